fn main() {
    std::process::exit(mminf_lab::cli::main());
}
