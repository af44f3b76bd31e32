fn main() {
    std::process::exit(kneadlab_cli::main_exit());
}
