fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(majn::cli::cli_main(&args));
}
