//! Window synthesis from `--window KIND [PARAMS]`.

use twisted_tf::blt::{example31_field, example32_field, PlateauRule};
use twisted_tf::field::{unit_cell_indicator, GridSpec, SampledField};
use twisted_tf::hermite::{gaussian_window, special_hermite};
use twisted_tf::io::read_field;
use twisted_tf::zak::perturbed_chi;

use crate::{CliError, CliResult, Common};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Window {
    Chi,
    Gaussian,
    Hermite(usize, usize),
    Example31(usize),
    Example32(usize),
    PerturbedChi(f64),
}

fn arg<T: std::str::FromStr>(spec: &[String], i: usize, what: &str) -> CliResult<T> {
    let raw = spec.get(i).ok_or_else(|| CliError(format!("window {} needs {what}", spec[0])))?;
    raw.parse().map_err(|_| CliError(format!("window {}: cannot parse {what} from {raw:?}", spec[0])))
}

impl Window {
    pub fn parse(spec: &[String]) -> CliResult<Self> {
        let expect = |n: usize| {
            if spec.len() != n {
                Err(CliError(format!("window {} takes {} parameter(s), got {}", spec[0], n - 1, spec.len() - 1)))
            } else {
                Ok(())
            }
        };
        let w = match spec.first().map(String::as_str) {
            Some("chi") => {
                expect(1)?;
                Window::Chi
            }
            Some("gaussian") => {
                expect(1)?;
                Window::Gaussian
            }
            Some("hermite") => {
                expect(3)?;
                Window::Hermite(arg(spec, 1, "m")?, arg(spec, 2, "n")?)
            }
            Some("example31") => {
                expect(2)?;
                Window::Example31(arg(spec, 1, "M")?)
            }
            Some("example32") => {
                expect(2)?;
                Window::Example32(arg(spec, 1, "kmax")?)
            }
            Some("perturbed-chi") => {
                expect(2)?;
                Window::PerturbedChi(arg(spec, 1, "amp")?)
            }
            Some(other) => {
                return Err(CliError(format!(
                    "unknown window {other:?} (chi, gaussian, hermite, example31, example32, perturbed-chi)"
                )))
            }
            None => return Err(CliError("empty --window".into())),
        };
        Ok(w)
    }

    pub fn synthesize(self, grid: GridSpec) -> CliResult<SampledField> {
        Ok(match self {
            Window::Chi => unit_cell_indicator(grid, 0.0, 0.0),
            Window::Gaussian => gaussian_window(grid),
            Window::Hermite(m, n) => special_hermite(m, n, grid)?,
            Window::Example31(m) => example31_field(m, grid)?,
            Window::Example32(k) => example32_field(k, grid, PlateauRule::Shrink)?,
            Window::PerturbedChi(amp) => perturbed_chi(grid, amp)?,
        })
    }
}

pub fn grid(common: &Common) -> CliResult<GridSpec> {
    Ok(GridSpec::new(common.resolution, common.truncation)?)
}

/// The field named by `--in`, or the `--window` synthesized on the common grid.
pub fn input_field(common: &Common) -> CliResult<SampledField> {
    match (&common.input, &common.window) {
        (Some(_), Some(_)) => Err(CliError("give either --in or --window, not both".into())),
        (Some(path), None) => {
            read_field(path).map_err(|e| CliError(format!("{}: {e}", path.display())))
        }
        (None, Some(spec)) => Window::parse(spec)?.synthesize(grid(common)?),
        (None, None) => Err(CliError("an input is required: --in FILE or --window KIND".into())),
    }
}

/// The window when it was given by `--window` rather than a file.
pub fn named_window(common: &Common) -> CliResult<Option<Window>> {
    match (&common.input, &common.window) {
        (None, Some(spec)) => Ok(Some(Window::parse(spec)?)),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn parses_all_kinds() {
        assert_eq!(Window::parse(&spec("chi")).unwrap(), Window::Chi);
        assert_eq!(Window::parse(&spec("hermite 1 2")).unwrap(), Window::Hermite(1, 2));
        assert_eq!(Window::parse(&spec("example31 8")).unwrap(), Window::Example31(8));
        assert_eq!(Window::parse(&spec("perturbed-chi 0.05")).unwrap(), Window::PerturbedChi(0.05));
        assert!(Window::parse(&spec("hermite 1")).is_err());
        assert!(Window::parse(&spec("sinc")).is_err());
    }
}
