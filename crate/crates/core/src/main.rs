fn main() {
    std::process::exit(entcost::cli::run(std::env::args_os()));
}
