fn main() {
    std::process::exit(biquotient_flats::cli::run(std::env::args()));
}
