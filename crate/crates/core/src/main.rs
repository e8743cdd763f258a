fn main() {
    std::process::exit(abs_steer::cli::run(std::env::args_os()));
}
