fn main() {
    std::process::exit(latgame_cli::run(std::env::args_os()));
}
