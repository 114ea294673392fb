//! Small built-in examples, one set per subcommand.

use twisted_tf::report::AnalysisReport;

use crate::{commands, CliResult, Command, Common, ComparatorArg, LoopArg, ScanArg, Suite};

fn common(resolution: usize, truncation: usize, window: &str) -> Common {
    Common {
        resolution,
        truncation,
        wres: None,
        guard: twisted_tf::zak::DEFAULT_GUARD,
        tol: None,
        seed: 42,
        input: None,
        window: Some(window.split_whitespace().map(String::from).collect()),
        out: None,
        report: None,
        csv: None,
        refine: None,
        override_size: false,
        selftest: false,
    }
}

/// Runs the examples for `command` and merges them under `example<i>`.
pub fn run(command: &Command) -> CliResult<AnalysisReport> {
    let cases: Vec<(Command, Common)> = match command {
        Command::Synth => {
            let dir = std::env::temp_dir().join(format!("twistf-selftest-{}", std::process::id()));
            std::fs::create_dir_all(&dir)?;
            let mut c = common(8, 2, "gaussian");
            c.out = Some(dir.join("g.tgf"));
            vec![(Command::Synth, c)]
        }
        Command::Zak => vec![(Command::Zak, common(8, 4, "chi")), (Command::Zak, common(8, 4, "gaussian"))],
        Command::Framebounds => {
            let mut c = common(32, 6, "gaussian");
            c.refine = Some(3);
            vec![(Command::Framebounds, c)]
        }
        Command::Dual { .. } => vec![(Command::Dual { delta: None }, common(8, 4, "perturbed-chi 0.05"))],
        Command::Biortho { .. } => {
            vec![(Command::Biortho { dual: None, range: 1 }, common(8, 4, "perturbed-chi 0.05"))]
        }
        Command::Weyl { .. } => {
            let mut c = common(16, 8, "gaussian");
            c.tol = Some(1e-2);
            vec![(Command::Weyl { n1: Some(16), k1: Some(4) }, c)]
        }
        Command::Uncertainty { .. } => vec![
            (Command::Uncertainty { caps: None }, common(16, 6, "gaussian")),
            (Command::Uncertainty { caps: Some((3, 3)) }, common(16, 8, "gaussian")),
        ],
        Command::BltScan { .. } => vec![
            (
                Command::BltScan {
                    kind: ScanArg::Example31Zbar,
                    levels: vec![4, 8],
                    comparator: ComparatorArg::Squared,
                },
                common(16, 4, "chi"),
            ),
            (
                Command::BltScan {
                    kind: ScanArg::Example32Amalgam,
                    levels: vec![4, 8],
                    comparator: ComparatorArg::Verbatim,
                },
                common(16, 4, "chi"),
            ),
        ],
        Command::Density { .. } => vec![(
            Command::Density {
                spacings: Some(vec![1.0, 1.0]),
                twisted: None,
                radii: vec![5.0, 10.0],
                expect: Some(1.0),
            },
            common(16, 4, "chi"),
        )],
        Command::Audit { .. } => vec![
            (Command::Audit { suite: Suite::Zak }, common(8, 4, "chi")),
            (Command::Audit { suite: Suite::Convolution }, common(8, 4, "chi")),
            (Command::Audit { suite: Suite::Lemma41 }, common(16, 4, "chi")),
        ],
        Command::Winding { .. } => vec![(
            Command::Winding {
                path: LoopArg::Circle,
                steps: 64,
                expect: Some(0.0),
            },
            common(16, 4, "chi"),
        )],
        Command::Smooth { .. } => vec![(Command::Smooth { radius: 0.25, pairs: 50 }, common(8, 4, "gaussian"))],
        Command::Oscillation { .. } => {
            vec![(Command::Oscillation { eps: (0.125, 0.0) }, common(16, 4, "gaussian"))]
        }
    };
    let mut merged = AnalysisReport::new("selftest");
    merged.value("examples", cases.len() as f64);
    for (i, (cmd, c)) in cases.iter().enumerate() {
        let r = commands::run(cmd, c)?;
        merged.absorb(&format!("example{i}.{}", r.command), &r);
    }
    Ok(merged)
}
