use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use annulus_core::analysis::ComparisonReport;
use annulus_core::exact::{CrossingDistribution, NomeSummary, SweepPoint};
use annulus_core::{CrossingForm, TrialStatistics};
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

use crate::Format;

pub const SCHEMA_VERSION: u32 = 1;

/// Machine formats: 17 significant digits, enough to round-trip any `f64`.
fn machine(x: f64) -> String {
    format!("{x:.16e}")
}

/// Human tables: 6 significant digits.
fn human(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-3..6).contains(&exponent) {
        format!("{x:.*}", (5 - exponent) as usize)
    } else {
        format!("{x:.5e}")
    }
}

struct SignificantDigits;

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(machine(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SignificantDigits);
    value
        .serialize(&mut ser)
        .expect("serialising to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

fn nome_line(prefix: &str, n: &NomeSummary, format: Format) -> String {
    match format {
        Format::Table => format!(
            "{prefix}rho = {}  q_tilde = exp(-2 pi rho) = {}  q = exp(-pi/rho) = {}\n",
            human(n.rho),
            human(n.q_tilde),
            human(n.q)
        ),
        _ => format!(
            "{prefix}rho={} q_tilde={} q={}\n",
            machine(n.rho),
            machine(n.q_tilde),
            machine(n.q)
        ),
    }
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(header.to_vec(), &mut out);
    for row in rows {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactOutput {
    pub nome: NomeSummary,
    pub abs_tol: f64,
    pub crossing: Vec<(CrossingForm, f64)>,
    pub distribution: CrossingDistribution,
    pub mean_nc: f64,
    pub o1_crossing: f64,
    pub z_plus_minus: f64,
    pub odd_hull: f64,
}

#[derive(Serialize)]
struct FormValue {
    form: CrossingForm,
    value: f64,
}

#[derive(Serialize)]
struct ExactJson<'a> {
    schema_version: u32,
    command: &'static str,
    nome: &'a NomeSummary,
    abs_tol: f64,
    crossing: Vec<FormValue>,
    p: &'a [f64],
    tail_bound: f64,
    mean_nc: f64,
    o1_crossing: f64,
    z_plus_minus: f64,
    odd_hull: f64,
}

impl ExactOutput {
    /// `(observable, form, value)` in output order.
    fn rows(&self) -> Vec<(String, &'static str, f64)> {
        let mut rows: Vec<_> = self
            .crossing
            .iter()
            .map(|&(f, v)| ("crossing".to_string(), f.key(), v))
            .collect();
        for (n_c, &p) in self.distribution.p.iter().enumerate() {
            rows.push((format!("p{n_c}"), "", p));
        }
        rows.push(("tail_bound".into(), "", self.distribution.tail_bound));
        rows.push(("mean_nc".into(), "", self.mean_nc));
        rows.push(("o1_crossing".into(), "", self.o1_crossing));
        rows.push(("z_plus_minus".into(), "", self.z_plus_minus));
        rows.push(("odd_hull".into(), "", self.odd_hull));
        rows
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(&ExactJson {
                schema_version: SCHEMA_VERSION,
                command: "exact",
                nome: &self.nome,
                abs_tol: self.abs_tol,
                crossing: self
                    .crossing
                    .iter()
                    .map(|&(form, value)| FormValue { form, value })
                    .collect(),
                p: &self.distribution.p,
                tail_bound: self.distribution.tail_bound,
                mean_nc: self.mean_nc,
                o1_crossing: self.o1_crossing,
                z_plus_minus: self.z_plus_minus,
                odd_hull: self.odd_hull,
            }),
            Format::Csv => {
                let mut out = format!("# schema_version={SCHEMA_VERSION}\n");
                out += &nome_line("# ", &self.nome, format);
                out += "observable,rho,form,value,abs_tol\n";
                for (name, form, value) in self.rows() {
                    let _ = writeln!(
                        out,
                        "{name},{},{form},{},{}",
                        machine(self.nome.rho),
                        machine(value),
                        machine(self.abs_tol)
                    );
                }
                out
            }
            Format::Table => {
                let mut out = nome_line("", &self.nome, format);
                let rows: Vec<Vec<String>> = self
                    .rows()
                    .into_iter()
                    .map(|(name, form, value)| vec![name, form.to_string(), human(value)])
                    .collect();
                out += &table(&["observable", "form", "value"], &rows);
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub n_max: u32,
    pub abs_tol: f64,
    pub log_spacing: bool,
    pub endpoints: [NomeSummary; 2],
    pub points: Vec<SweepPoint>,
}

#[derive(Serialize)]
struct SweepJson<'a> {
    schema_version: u32,
    command: &'static str,
    nome: &'a [NomeSummary; 2],
    abs_tol: f64,
    log_spacing: bool,
    points: &'a [SweepPoint],
}

impl SweepOutput {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["rho".to_string(), "crossing".to_string()];
        h.extend((1..=self.n_max).map(|n| format!("p{n}")));
        h.push("mean_nc".into());
        h
    }

    fn cells(p: &SweepPoint, fmt: fn(f64) -> String) -> Vec<String> {
        let mut row = vec![fmt(p.rho), fmt(p.crossing)];
        row.extend(p.p.iter().map(|&v| fmt(v)));
        row.push(fmt(p.mean_nc));
        row
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(&SweepJson {
                schema_version: SCHEMA_VERSION,
                command: "sweep",
                nome: &self.endpoints,
                abs_tol: self.abs_tol,
                log_spacing: self.log_spacing,
                points: &self.points,
            }),
            Format::Csv => {
                let mut out = format!("# schema_version={SCHEMA_VERSION}\n");
                out += &nome_line("# first: ", &self.endpoints[0], format);
                out += &nome_line("# last: ", &self.endpoints[1], format);
                out += &self.header().join(",");
                out.push('\n');
                for p in &self.points {
                    out += &Self::cells(p, machine).join(",");
                    out.push('\n');
                }
                out
            }
            Format::Table => {
                let mut out = nome_line("first: ", &self.endpoints[0], format);
                out += &nome_line("last:  ", &self.endpoints[1], format);
                let header = self.header();
                let header: Vec<&str> = header.iter().map(String::as_str).collect();
                let rows: Vec<Vec<String>> =
                    self.points.iter().map(|p| Self::cells(p, human)).collect();
                out += &table(&header, &rows);
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McOutput {
    pub rho_requested: f64,
    pub stats: TrialStatistics,
    pub report: ComparisonReport,
    /// Seconds since the Unix epoch, only when asked for.
    pub timestamp: Option<u64>,
}

#[derive(Serialize)]
struct GeometryJson {
    rows: usize,
    cols: usize,
    sites_per_row: usize,
}

#[derive(Serialize)]
struct McJson<'a> {
    schema_version: u32,
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
    nome: &'a NomeSummary,
    geometry: GeometryJson,
    rho_requested: f64,
    rho_effective: f64,
    rho_extended: f64,
    master_seed: u64,
    trials: u64,
    wrap_excluded: u64,
    histogram: &'a BTreeMap<u32, u64>,
    report: &'a ComparisonReport,
}

impl McOutput {
    fn summary_lines(&self, prefix: &str, format: Format) -> String {
        let g = self.stats.geometry;
        let fmt = if format == Format::Table {
            human
        } else {
            machine
        };
        let mut out = nome_line(prefix, &self.report.nome, format);
        let _ = writeln!(
            out,
            "{prefix}lattice {} rows x {} cols ({} sites per row), rho requested {}, effective {}, extended {}",
            g.rows(),
            g.cols(),
            g.width(),
            fmt(self.rho_requested),
            fmt(g.rho_effective()),
            fmt(g.rho_extended())
        );
        let _ = writeln!(
            out,
            "{prefix}seed {}, trials {}, wrap-excluded {}",
            self.stats.master_seed, self.stats.trials, self.stats.wrap_excluded
        );
        if let Some(t) = self.timestamp {
            let _ = writeln!(out, "{prefix}timestamp {t}");
        }
        let histogram: Vec<String> = self
            .stats
            .histogram
            .iter()
            .map(|(k, v)| format!("{k}:{v}"))
            .collect();
        let _ = writeln!(out, "{prefix}histogram {}", histogram.join(" "));
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let g = self.stats.geometry;
                to_json(&McJson {
                    schema_version: SCHEMA_VERSION,
                    command: "mc",
                    timestamp: self.timestamp,
                    nome: &self.report.nome,
                    geometry: GeometryJson {
                        rows: g.rows(),
                        cols: g.cols(),
                        sites_per_row: g.width(),
                    },
                    rho_requested: self.rho_requested,
                    rho_effective: g.rho_effective(),
                    rho_extended: g.rho_extended(),
                    master_seed: self.stats.master_seed,
                    trials: self.stats.trials,
                    wrap_excluded: self.stats.wrap_excluded,
                    histogram: &self.stats.histogram,
                    report: &self.report,
                })
            }
            Format::Csv => {
                let mut out = format!("# schema_version={SCHEMA_VERSION}\n");
                out += &self.summary_lines("# ", format);
                out += "observable,rho_effective,exact,estimate,lower,upper,half_width,z_score,expected_count,insufficient_statistics\n";
                for r in &self.report.rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{}",
                        r.observable,
                        machine(self.report.rho_effective),
                        machine(r.exact),
                        machine(r.estimate),
                        machine(r.lower),
                        machine(r.upper),
                        machine(r.half_width),
                        machine(r.z_score),
                        r.expected_count.map(machine).unwrap_or_default(),
                        r.insufficient_statistics
                    );
                }
                out
            }
            Format::Table => {
                let mut out = self.summary_lines("", format);
                let rows: Vec<Vec<String>> = self
                    .report
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.observable.clone(),
                            human(r.exact),
                            human(r.estimate),
                            format!("[{}, {}]", human(r.lower), human(r.upper)),
                            format!("{:.2}", r.z_score),
                            if r.insufficient_statistics {
                                "insufficient statistics".into()
                            } else {
                                String::new()
                            },
                        ]
                    })
                    .collect();
                let confidence = format!("{:.0}% interval", 100.0 * self.report.confidence);
                out += &table(
                    &["observable", "exact", "estimate", &confidence, "z", ""],
                    &rows,
                );
                out
            }
        }
    }
}
