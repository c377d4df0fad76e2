fn main() {
    std::process::exit(roadkg::cli::run(std::env::args_os()));
}
