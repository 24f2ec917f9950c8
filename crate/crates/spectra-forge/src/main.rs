fn main() {
    std::process::exit(spectra_forge::cli::run(std::env::args_os()));
}
