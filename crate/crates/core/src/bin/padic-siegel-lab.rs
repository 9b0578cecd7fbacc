fn main() {
    env_logger::init();
    std::process::exit(padic_siegel::cli::parse_and_dispatch(std::env::args_os()));
}
