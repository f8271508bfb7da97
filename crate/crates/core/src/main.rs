fn main() {
    std::process::exit(hulltool::cli::run(std::env::args_os()));
}
