fn main() {
    std::process::exit(somm_bench::cli::cli_main(std::env::args_os()));
}
