fn main() {
    std::process::exit(secgame::cli::main_with(std::env::args_os()));
}
