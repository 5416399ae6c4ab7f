//! Runs a campaign over generated instances. The example doubles as the
//! solver under test: invoked with `--solve <file>` it runs the CLI.

use std::fs;
use std::time::Duration;

use xcsp_mini::generators::{gen_dubois, gen_langford};
use xcsp_mini::harness::{run_campaign, write_records, Campaign};
use xcsp_mini::xcsp::write_instance;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.len() == 3 && args[1] == "--solve" {
        let mut out = std::io::stdout().lock();
        let mut err = std::io::stderr().lock();
        let code = xcsp_mini::cli::run(["xcsp-mini", "solve", &args[2]], &mut out, &mut err);
        std::process::exit(code);
    }

    let dir = tempfile::tempdir().unwrap();
    for (id, instance) in [
        ("dubois-4", gen_dubois(4).unwrap()),
        ("langford-3", gen_langford(3).unwrap()),
        ("langford-4", gen_langford(4).unwrap()),
    ] {
        fs::write(dir.path().join(format!("{id}.xml")), write_instance(&instance).unwrap()).unwrap();
    }
    let me = std::env::current_exe().unwrap();
    let campaign = Campaign {
        solver: "self".into(),
        command: format!("{} --solve {{instance}}", me.display()),
        time_limit: Duration::from_secs(10),
        jobs: 2,
    };
    let records = run_campaign(dir.path(), &campaign).unwrap();
    let mut csv = Vec::new();
    write_records(&mut csv, &records).unwrap();
    print!("{}", String::from_utf8(csv).unwrap());
}
