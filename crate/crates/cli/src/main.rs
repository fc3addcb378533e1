fn main() {
    std::process::exit(fepkit_cli::run(std::env::args_os()));
}
