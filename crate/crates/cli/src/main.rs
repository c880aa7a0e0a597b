fn main() {
    std::process::exit(zgraphon::run(std::env::args_os()));
}
