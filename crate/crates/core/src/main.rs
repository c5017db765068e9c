fn main() {
    std::process::exit(torsion_bt::cli::run_from_args());
}
