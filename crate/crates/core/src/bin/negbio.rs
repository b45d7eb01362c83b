use std::path::PathBuf;

fn main() {
    let config = std::env::var_os(negbio::cli::CONFIG_ENV).map(PathBuf::from);
    let code = negbio::cli::run(
        std::env::args_os(),
        config.as_deref(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    std::process::exit(code);
}
