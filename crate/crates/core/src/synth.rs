//! Seeded synthetic grade files with planted structure.
//!
//! Every student gets a home department, an ability score and a first year of
//! ten half-credit courses (fall and winter). Dropout is drawn from a logistic
//! function of the first-year features, calibrated to a target rate; completers
//! keep studying, mostly in their home department, until they pass enough
//! credits and the home department leads their credit count. A small share of
//! students register for too few credits and are excluded.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::config::{parse_key_values, parse_value, Entry};
use crate::error::{Error, Result};
use crate::ingest::{
    build_features, feature_names, write_records, FirstYearWindow, GradeRecord, IngestOptions,
    Semester, Term,
};
use crate::seed::{derive_seed, derived_rng, stream, Rng};

const CREDIT: f64 = 0.5;
const COURSES_PER_SEMESTER: usize = 5;
const MAX_SEMESTERS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepartmentRole {
    /// Fills free course slots, weighted by popularity; can be a home department.
    Regular,
    /// Exactly one first-year course for every student.
    Core,
    /// Taken in the first year (two courses) with `elective_probability`.
    Elective,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepartmentProfile {
    pub code: String,
    pub grade_mean: f64,
    pub grade_spread: f64,
    pub popularity: f64,
    pub role: DepartmentRole,
}

impl DepartmentProfile {
    pub fn new(code: &str, grade_mean: f64, grade_spread: f64, popularity: f64, role: DepartmentRole) -> Self {
        DepartmentProfile {
            code: code.to_string(),
            grade_mean,
            grade_spread,
            popularity,
            role,
        }
    }
}

/// Additive terms of the dropout log-odds, evaluated on first-year features
/// (named as in the ingested datasets, e.g. `"MAT"` or `"MAT G"`).
#[derive(Debug, Clone, PartialEq)]
pub enum DropoutTerm {
    Linear {
        feature: String,
        coefficient: f64,
        center: f64,
    },
    /// Adds `weight` when exactly one of the two features exceeds `threshold`.
    Xor {
        a: String,
        b: String,
        threshold: f64,
        weight: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_students: usize,
    pub seed: u64,
    pub departments: Vec<DepartmentProfile>,
    pub dropout_terms: Vec<DropoutTerm>,
    /// Share of dropouts among students who are not excluded.
    pub target_dropout_rate: f64,
    /// Share of students who register for fewer than 5 credits.
    pub excluded_fraction: f64,
    /// Correlation of a student's grades across courses is `ability_weight^2`.
    pub ability_weight: f64,
    /// Chance a free first-year slot goes to the home department.
    pub focus: f64,
    /// Chance a later-year slot goes to the home department.
    pub later_focus: f64,
    pub elective_probability: f64,
    pub start_year: i32,
    pub cohort_years: u32,
    pub pass_mark: f64,
}

fn regular(code: &str, mean: f64, spread: f64, popularity: f64) -> DepartmentProfile {
    DepartmentProfile::new(code, mean, spread, popularity, DepartmentRole::Regular)
}

fn linear(feature: &str, coefficient: f64, center: f64) -> DropoutTerm {
    DropoutTerm::Linear {
        feature: feature.to_string(),
        coefficient,
        center,
    }
}

impl SynthConfig {
    /// Eight departments from low- to high-grading; dropout driven by math and
    /// chemistry grades plus a general ability effect.
    pub fn default_scenario(n_students: usize, seed: u64) -> Self {
        SynthConfig {
            n_students,
            seed,
            departments: vec![
                regular("CHM", 66.0, 13.0, 1.0),
                regular("CSC", 70.0, 14.0, 0.9),
                regular("ECO", 68.0, 11.0, 1.1),
                regular("ENG", 75.0, 8.0, 0.8),
                regular("HIS", 76.0, 8.0, 0.5),
                regular("MAT", 62.0, 15.0, 1.2),
                regular("PHY", 65.0, 13.0, 0.7),
                regular("PSY", 73.0, 10.0, 0.9),
            ],
            dropout_terms: vec![linear("MAT G", -0.05, 62.0), linear("CHM G", -0.04, 66.0)],
            target_dropout_rate: 0.3,
            excluded_fraction: 0.05,
            ability_weight: 0.6,
            focus: 0.4,
            later_focus: 0.6,
            elective_probability: 0.5,
            start_year: 2000,
            cohort_years: 5,
            pass_mark: 50.0,
        }
    }

    /// Everyone takes one course in the low-grading core department LOWG;
    /// dropout depends on that grade alone and grades are independent across
    /// courses, so every other predictor is pure noise.
    pub fn planted_scenario(n_students: usize, seed: u64) -> Self {
        let mut c = SynthConfig::default_scenario(n_students, seed);
        c.departments.push(DepartmentProfile::new(
            "LOWG",
            58.0,
            15.0,
            0.0,
            DepartmentRole::Core,
        ));
        c.dropout_terms = vec![linear("LOWG G", -0.12, 58.0)];
        c.ability_weight = 0.0;
        c
    }

    /// Dropout depends on taking exactly one of two electives (CSC, ECO) plus a
    /// linear effect of the math grade. The interaction is invisible to a
    /// linear model; the grade effect is not.
    pub fn xor_scenario(n_students: usize, seed: u64) -> Self {
        let mut c = SynthConfig::default_scenario(n_students, seed);
        for d in &mut c.departments {
            if d.code == "CSC" || d.code == "ECO" {
                d.role = DepartmentRole::Elective;
            }
        }
        c.dropout_terms = vec![
            DropoutTerm::Xor {
                a: "CSC".into(),
                b: "ECO".into(),
                threshold: 0.0,
                weight: 4.0,
            },
            linear("MAT G", -0.05, 62.0),
        ];
        c.target_dropout_rate = 0.4;
        c.ability_weight = 0.0;
        c
    }

    pub fn scenario(name: &str, n_students: usize, seed: u64) -> Result<Self> {
        match name {
            "default" => Ok(Self::default_scenario(n_students, seed)),
            "planted" => Ok(Self::planted_scenario(n_students, seed)),
            "xor" => Ok(Self::xor_scenario(n_students, seed)),
            other => Err(Error::Config(format!(
                "unknown scenario {other:?} (expected default, planted or xor)"
            ))),
        }
    }

    /// Sorted department codes; the feature layout of the ingested data.
    pub fn department_codes(&self) -> Vec<String> {
        let mut codes: Vec<String> = self.departments.iter().map(|d| d.code.clone()).collect();
        codes.sort();
        codes
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.departments.len() < 2 {
            return cfg("at least 2 departments are required".into());
        }
        let mut seen = std::collections::HashSet::new();
        for d in &self.departments {
            if d.code.is_empty() || d.code.contains([',', '"', ' ']) {
                return cfg(format!("bad department code {:?}", d.code));
            }
            if !seen.insert(d.code.as_str()) {
                return cfg(format!("duplicate department {:?}", d.code));
            }
            if !(d.popularity >= 0.0) || !(d.grade_spread >= 0.0) || !d.grade_mean.is_finite() {
                return cfg(format!("department {}: bad grade or popularity values", d.code));
            }
        }
        if !self
            .departments
            .iter()
            .any(|d| d.role == DepartmentRole::Regular && d.popularity > 0.0)
        {
            return cfg("need a regular department with positive popularity".into());
        }
        let fixed = self
            .departments
            .iter()
            .filter(|d| d.role != DepartmentRole::Regular)
            .count();
        if fixed > COURSES_PER_SEMESTER {
            return cfg(format!(
                "at most {COURSES_PER_SEMESTER} core and elective departments are supported"
            ));
        }
        for (name, p) in [
            ("target_dropout_rate", self.target_dropout_rate),
            ("excluded_fraction", self.excluded_fraction),
            ("ability_weight", self.ability_weight),
            ("focus", self.focus),
            ("later_focus", self.later_focus),
            ("elective_probability", self.elective_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return cfg(format!("{name} must be a probability, got {p}"));
            }
        }
        if self.target_dropout_rate <= 0.0 || self.target_dropout_rate >= 1.0 {
            return cfg("target_dropout_rate must be strictly between 0 and 1".into());
        }
        if self.cohort_years == 0 {
            return cfg("cohort_years must be at least 1".into());
        }
        let names = feature_names(&self.department_codes());
        let known = |f: &str| -> Result<()> {
            if names.iter().any(|n| n == f) {
                Ok(())
            } else {
                Err(Error::Config(format!("dropout term uses unknown feature {f:?}")))
            }
        };
        for t in &self.dropout_terms {
            match t {
                DropoutTerm::Linear { feature, .. } => known(feature)?,
                DropoutTerm::Xor { a, b, .. } => {
                    known(a)?;
                    known(b)?;
                }
            }
        }
        Ok(())
    }

    /// Reads a flat `key = value` file.
    ///
    /// `scenario` picks the starting point (default, planted, xor); scalar keys
    /// override it. `department = CODE mean spread popularity [regular|core|elective]`
    /// lines replace the department list, `dropout_linear = FEATURE, coef, center`
    /// and `dropout_xor = A, B, threshold, weight` lines replace the dropout terms.
    /// A `seed` key, if present, must agree with `seed`.
    pub fn from_text(text: &str, seed: u64) -> Result<Self> {
        let entries = parse_key_values(text)?;
        let scenario = entries
            .iter()
            .rev()
            .find(|e| e.key == "scenario")
            .map_or("default", |e| e.value.as_str());
        let mut c = SynthConfig::scenario(scenario, 0, seed)?;
        let mut departments = Vec::new();
        let mut terms = Vec::new();
        for e in &entries {
            match e.key.as_str() {
                "scenario" => {}
                "seed" => {
                    if parse_value::<u64>(e)? != seed {
                        return Err(Error::Config(format!(
                            "line {}: config seed {} disagrees with --seed {seed}",
                            e.line, e.value
                        )));
                    }
                }
                "n_students" => c.n_students = parse_value(e)?,
                "target_dropout_rate" => c.target_dropout_rate = parse_value(e)?,
                "excluded_fraction" => c.excluded_fraction = parse_value(e)?,
                "ability_weight" => c.ability_weight = parse_value(e)?,
                "focus" => c.focus = parse_value(e)?,
                "later_focus" => c.later_focus = parse_value(e)?,
                "elective_probability" => c.elective_probability = parse_value(e)?,
                "start_year" => c.start_year = parse_value(e)?,
                "cohort_years" => c.cohort_years = parse_value(e)?,
                "pass_mark" => c.pass_mark = parse_value(e)?,
                "department" => departments.push(parse_department(e)?),
                "dropout_linear" => terms.push(parse_linear(e)?),
                "dropout_xor" => terms.push(parse_xor(e)?),
                other => {
                    return Err(Error::Config(format!("line {}: unknown key `{other}`", e.line)))
                }
            }
        }
        if !departments.is_empty() {
            c.departments = departments;
        }
        if !terms.is_empty() {
            c.dropout_terms = terms;
        }
        c.validate()?;
        Ok(c)
    }

    /// The effective configuration in the format read by [`SynthConfig::from_text`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        kv("seed", self.seed.to_string());
        kv("n_students", self.n_students.to_string());
        kv("target_dropout_rate", self.target_dropout_rate.to_string());
        kv("excluded_fraction", self.excluded_fraction.to_string());
        kv("ability_weight", self.ability_weight.to_string());
        kv("focus", self.focus.to_string());
        kv("later_focus", self.later_focus.to_string());
        kv("elective_probability", self.elective_probability.to_string());
        kv("start_year", self.start_year.to_string());
        kv("cohort_years", self.cohort_years.to_string());
        kv("pass_mark", self.pass_mark.to_string());
        for d in &self.departments {
            let role = match d.role {
                DepartmentRole::Regular => "regular",
                DepartmentRole::Core => "core",
                DepartmentRole::Elective => "elective",
            };
            kv(
                "department",
                format!("{} {} {} {} {role}", d.code, d.grade_mean, d.grade_spread, d.popularity),
            );
        }
        for t in &self.dropout_terms {
            match t {
                DropoutTerm::Linear {
                    feature,
                    coefficient,
                    center,
                } => kv("dropout_linear", format!("{feature}, {coefficient}, {center}")),
                DropoutTerm::Xor {
                    a,
                    b,
                    threshold,
                    weight,
                } => kv("dropout_xor", format!("{a}, {b}, {threshold}, {weight}")),
            }
        }
        out
    }
}

fn field<T: std::str::FromStr>(e: &Entry, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| {
        Error::Config(format!("line {}: cannot parse {:?} in `{}`", e.line, s.trim(), e.key))
    })
}

fn parse_department(e: &Entry) -> Result<DepartmentProfile> {
    let parts: Vec<&str> = e.value.split_whitespace().collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(Error::Config(format!(
            "line {}: expected `department = CODE mean spread popularity [role]`",
            e.line
        )));
    }
    let role = match parts.get(4).copied().unwrap_or("regular") {
        "regular" => DepartmentRole::Regular,
        "core" => DepartmentRole::Core,
        "elective" => DepartmentRole::Elective,
        other => return Err(Error::Config(format!("line {}: unknown role {other:?}", e.line))),
    };
    Ok(DepartmentProfile::new(
        parts[0],
        field(e, parts[1])?,
        field(e, parts[2])?,
        field(e, parts[3])?,
        role,
    ))
}

fn split_fields(e: &Entry, n: usize) -> Result<Vec<&str>> {
    let parts: Vec<&str> = e.value.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(Error::Config(format!(
            "line {}: `{}` takes {n} comma-separated fields",
            e.line, e.key
        )));
    }
    Ok(parts)
}

fn parse_linear(e: &Entry) -> Result<DropoutTerm> {
    let p = split_fields(e, 3)?;
    Ok(DropoutTerm::Linear {
        feature: p[0].to_string(),
        coefficient: field(e, p[1])?,
        center: field(e, p[2])?,
    })
}

fn parse_xor(e: &Entry) -> Result<DropoutTerm> {
    let p = split_fields(e, 4)?;
    Ok(DropoutTerm::Xor {
        a: p[0].to_string(),
        b: p[1].to_string(),
        threshold: field(e, p[2])?,
        weight: field(e, p[3])?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthRow {
    pub student_id: String,
    /// `completed`, `dropout` or `excluded`.
    pub completion: &'static str,
    pub major: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub records: Vec<GradeRecord>,
    pub truth: Vec<TruthRow>,
    /// Calibrated intercept of the dropout log-odds.
    pub dropout_intercept: f64,
}

impl SynthOutput {
    pub fn write_records<W: Write>(&self, writer: W) -> Result<()> {
        write_records(&self.records, writer)
    }

    pub fn write_truth<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["student_id", "completion", "major"])?;
        for t in &self.truth {
            wtr.write_record([
                t.student_id.as_str(),
                t.completion,
                t.major.as_deref().unwrap_or(""),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn weighted_pick(rng: &mut Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

struct Student {
    id: String,
    rng: Rng,
    home: usize,
    ability: f64,
    start: Semester,
    records: Vec<GradeRecord>,
    /// Dropout log-odds without the intercept; `None` for excluded students.
    score: Option<f64>,
}

struct Generator<'a> {
    config: &'a SynthConfig,
    /// Popularity of regular departments, zero elsewhere.
    weights: Vec<f64>,
}

impl Generator<'_> {
    fn course(&self, s: &mut Student, dept: usize, semester: Semester) {
        let d = &self.config.departments[dept];
        let w = self.config.ability_weight;
        let z: f64 = s.rng.sample(StandardNormal);
        let raw = d.grade_mean + d.grade_spread * (w * s.ability + (1.0 - w * w).sqrt() * z);
        let level = 100 * (1 + (semester.year - s.start.year).clamp(0, 3));
        let n = s.records.len();
        s.records.push(GradeRecord {
            student_id: s.id.clone(),
            course_title: format!("{}{}", d.code, level + n as i32),
            department: d.code.clone(),
            semester,
            credit_value: CREDIT,
            grade: raw.round().clamp(0.0, 100.0),
        });
    }

    fn free_slot(&self, s: &mut Student, focus: f64) -> usize {
        if s.rng.random::<f64>() < focus {
            s.home
        } else {
            weighted_pick(&mut s.rng, &self.weights)
        }
    }

    fn first_year(&self, s: &mut Student) {
        let fall = s.start;
        let winter = Semester::new(fall.year + 1, Term::Winter);
        let mut fall_slots = Vec::new();
        let mut winter_slots = Vec::new();
        for (i, d) in self.config.departments.iter().enumerate() {
            match d.role {
                DepartmentRole::Core => fall_slots.push(i),
                DepartmentRole::Elective => {
                    if s.rng.random::<f64>() < self.config.elective_probability {
                        fall_slots.push(i);
                        winter_slots.push(i);
                    }
                }
                DepartmentRole::Regular => {}
            }
        }
        while fall_slots.len() < COURSES_PER_SEMESTER {
            fall_slots.push(self.free_slot(s, self.config.focus));
        }
        while winter_slots.len() < COURSES_PER_SEMESTER {
            winter_slots.push(self.free_slot(s, self.config.focus));
        }
        for d in fall_slots {
            self.course(s, d, fall);
        }
        for d in winter_slots {
            self.course(s, d, winter);
        }
    }

    fn light_load(&self, s: &mut Student) {
        let n = s.rng.random_range(1..=3);
        for _ in 0..n {
            let d = weighted_pick(&mut s.rng, &self.weights);
            self.course(s, d, s.start);
        }
    }

    fn dropout_years(&self, s: &mut Student) {
        // Some dropouts try one more semester before leaving.
        if s.rng.random::<f64>() < 0.5 {
            let fall = Semester::new(s.start.year + 1, Term::Fall);
            let n = s.rng.random_range(1..=3);
            for _ in 0..n {
                let d = self.free_slot(s, self.config.later_focus);
                self.course(s, d, fall);
            }
        }
    }

    fn passed_by_department(&self, s: &Student) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        for r in s.records.iter().filter(|r| r.passed(self.config.pass_mark)) {
            *m.entry(r.department.clone()).or_insert(0.0) += r.credit_value;
        }
        m
    }

    /// Keeps studying until enough credits are passed and the home department
    /// is the major under the max-credits rule. Returns the major.
    fn completer_years(&self, s: &mut Student) -> String {
        let home = self.config.departments[s.home].code.clone();
        let mut semester = Semester::new(s.start.year + 1, Term::Fall);
        let options = IngestOptions::default();
        for _ in 0..MAX_SEMESTERS {
            let passed = self.passed_by_department(s);
            let total: f64 = passed.values().sum();
            let major = major_of(&passed);
            if total + 1e-9 >= options.completed_credits && major.as_deref() == Some(home.as_str()) {
                return home;
            }
            let enough = total + 1e-9 >= options.completed_credits;
            for _ in 0..COURSES_PER_SEMESTER {
                // Once the credit total is reached only the home department is studied.
                let d = if enough {
                    s.home
                } else {
                    self.free_slot(s, self.config.later_focus)
                };
                self.course(s, d, semester);
            }
            semester = next_term(semester);
        }
        major_of(&self.passed_by_department(s)).unwrap_or(home)
    }
}

/// Fall and winter terms only; the calendar still counts summers in between.
fn next_term(s: Semester) -> Semester {
    match s.term {
        Term::Fall => Semester::new(s.year + 1, Term::Winter),
        _ => Semester::new(s.year, Term::Fall),
    }
}

fn major_of(passed: &BTreeMap<String, f64>) -> Option<String> {
    let mut best: Option<(&String, f64)> = None;
    for (d, &c) in passed {
        if best.is_none_or(|(_, b)| c > b + 1e-9) {
            best = Some((d, c));
        }
    }
    best.map(|(d, _)| d.clone())
}

fn dropout_score(config: &SynthConfig, names: &[String], x: &[f64]) -> f64 {
    let value = |f: &str| x[names.iter().position(|n| n == f).expect("validated feature")];
    config
        .dropout_terms
        .iter()
        .map(|t| match t {
            DropoutTerm::Linear {
                feature,
                coefficient,
                center,
            } => coefficient * (value(feature) - center),
            DropoutTerm::Xor {
                a,
                b,
                threshold,
                weight,
            } => {
                if (value(a) > *threshold) != (value(b) > *threshold) {
                    *weight
                } else {
                    0.0
                }
            }
        })
        .sum()
}

/// Intercept `c` with `mean(sigmoid(c + s_i)) = target`, by bisection.
fn calibrate_intercept(scores: &[f64], target: f64) -> f64 {
    if scores.is_empty() {
        return 0.0;
    }
    let mean = |c: f64| scores.iter().map(|s| sigmoid(c + s)).sum::<f64>() / scores.len() as f64;
    let (mut lo, mut hi) = (-100.0, 100.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn generate(config: &SynthConfig) -> Result<SynthOutput> {
    config.validate()?;
    let weights: Vec<f64> = config
        .departments
        .iter()
        .map(|d| if d.role == DepartmentRole::Regular { d.popularity } else { 0.0 })
        .collect();
    let gen = Generator { config, weights };
    let codes = config.department_codes();
    let names = feature_names(&codes);
    let width = (config.n_students.max(1) - 1).to_string().len().max(5);

    let mut students = Vec::with_capacity(config.n_students);
    for i in 0..config.n_students {
        let mut rng = derived_rng(config.seed, stream::SYNTH, i as u64);
        let home = weighted_pick(&mut rng, &gen.weights);
        let ability: f64 = rng.sample(StandardNormal);
        let year = config.start_year + rng.random_range(0..config.cohort_years) as i32;
        let excluded = rng.random::<f64>() < config.excluded_fraction;
        let mut s = Student {
            id: format!("S{i:0width$}"),
            rng,
            home,
            ability,
            start: Semester::new(year, Term::Fall),
            records: Vec::new(),
            score: None,
        };
        if excluded {
            gen.light_load(&mut s);
        } else {
            gen.first_year(&mut s);
            let window = FirstYearWindow {
                records: s.records.clone(),
                reached: true,
            };
            let x = build_features(&window, &codes)?;
            s.score = Some(dropout_score(config, &names, &x));
        }
        students.push(s);
    }

    let scores: Vec<f64> = students.iter().filter_map(|s| s.score).collect();
    let intercept = calibrate_intercept(&scores, config.target_dropout_rate);
    // Systematic sampling: marginal dropout chance is exactly p_i and the
    // realised count is within one of the expected count.
    let mut offset_rng = derived_rng(derive_seed(config.seed, stream::SYNTH, u64::MAX), 0, 0);
    let offset: f64 = offset_rng.random();
    let mut cumulative = offset;

    let mut records = Vec::new();
    let mut truth = Vec::with_capacity(students.len());
    for mut s in students {
        let (completion, major) = match s.score {
            None => ("excluded", None),
            Some(score) => {
                let before = cumulative.floor();
                cumulative += sigmoid(intercept + score);
                if cumulative.floor() > before {
                    gen.dropout_years(&mut s);
                    ("dropout", None)
                } else {
                    let major = gen.completer_years(&mut s);
                    ("completed", Some(major))
                }
            }
        };
        truth.push(TruthRow {
            student_id: s.id.clone(),
            completion,
            major,
        });
        records.append(&mut s.records);
    }
    Ok(SynthOutput {
        records,
        truth,
        dropout_intercept: intercept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_cohort, parse_records};

    #[test]
    fn zero_students_gives_empty_files() {
        let out = generate(&SynthConfig::default_scenario(0, 1)).unwrap();
        assert!(out.records.is_empty() && out.truth.is_empty());
        let mut buf = Vec::new();
        out.write_records(&mut buf).unwrap();
        assert_eq!(parse_records(buf.as_slice()).unwrap().records.len(), 0);
    }

    #[test]
    fn output_parses_without_rejects_and_is_deterministic() {
        let config = SynthConfig::xor_scenario(200, 11);
        let a = generate(&config).unwrap();
        let b = generate(&config).unwrap();
        assert_eq!(a, b);
        let mut buf = Vec::new();
        a.write_records(&mut buf).unwrap();
        let parsed = parse_records(buf.as_slice()).unwrap();
        assert!(parsed.rejects.is_empty());
        assert_eq!(parsed.records.len(), a.records.len());
        let other = generate(&SynthConfig::xor_scenario(200, 12)).unwrap();
        assert_ne!(a.records, other.records);
    }

    #[test]
    fn ingest_recovers_truth_and_rates() {
        let config = SynthConfig::default_scenario(2000, 5);
        let out = generate(&config).unwrap();
        let cohort = build_cohort(&out.records, &IngestOptions::default()).unwrap();
        let agree = cohort
            .entries
            .iter()
            .zip(&out.truth)
            .filter(|(e, t)| {
                assert_eq!(e.student_id, t.student_id);
                e.label.name() == t.completion && e.major == t.major
            })
            .count();
        assert!(agree as f64 >= 0.99 * out.truth.len() as f64, "{agree}");
        let rate = cohort.audit.dropout as f64 / (cohort.audit.dropout + cohort.audit.completed) as f64;
        assert!((rate - config.target_dropout_rate).abs() <= 0.02, "{rate}");
    }

    #[test]
    fn config_text_round_trip() {
        let c = SynthConfig::planted_scenario(300, 4);
        let back = SynthConfig::from_text(&c.to_text(), 4).unwrap();
        assert_eq!(back, c);
        assert!(matches!(SynthConfig::from_text(&c.to_text(), 5), Err(Error::Config(_))));
        let minimal = SynthConfig::from_text("scenario = xor\nn_students = 10\n", 3).unwrap();
        assert_eq!(minimal.n_students, 10);
        assert_eq!(minimal.dropout_terms, SynthConfig::xor_scenario(10, 3).dropout_terms);
        assert!(matches!(
            SynthConfig::from_text("dropout_linear = NOPE G, 1, 0\n", 1),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            SynthConfig::from_text("department = A 60 10 1\n", 1),
            Err(Error::Config(_))
        ));
    }
}
