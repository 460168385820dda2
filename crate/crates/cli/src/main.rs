fn main() {
    std::process::exit(cheby_cli::run(std::env::args_os()));
}
