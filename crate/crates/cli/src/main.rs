fn main() {
    std::process::exit(moment_spaces_cli::args::main_with(std::env::args_os()));
}
