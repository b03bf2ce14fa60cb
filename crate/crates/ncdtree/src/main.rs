fn main() {
    env_logger::init();
    if let Err(e) = ncdtree::cli::run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
