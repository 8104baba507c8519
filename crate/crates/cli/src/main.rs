fn main() {
    std::process::exit(patentflow_cli::run(std::env::args_os()));
}
