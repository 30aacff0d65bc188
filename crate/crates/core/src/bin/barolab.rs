fn main() {
    std::process::exit(barolab::harness::cli(std::env::args_os()));
}
