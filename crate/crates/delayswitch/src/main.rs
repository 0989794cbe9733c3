fn main() {
    std::process::exit(delayswitch::cli::run(std::env::args_os()));
}
