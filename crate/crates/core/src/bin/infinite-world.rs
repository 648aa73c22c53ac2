fn main() {
    std::process::exit(infinite_world::cli::run(std::env::args_os()));
}
