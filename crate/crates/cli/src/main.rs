use clap::Parser;

fn main() {
    let cli = match trefoil_cli::config::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors are input errors (1); clap's own default of 2 is
            // reserved for "no trefoil certified".
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let code = match trefoil_cli::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    std::process::exit(code);
}
