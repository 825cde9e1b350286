fn main() {
    std::process::exit(cavity_vdw::cli::main());
}
