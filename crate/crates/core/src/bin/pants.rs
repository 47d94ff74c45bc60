fn main() {
    std::process::exit(shape_pants::commands::main_with(std::env::args_os()));
}
