//! Raw grade records to modeling datasets: per-student histories, first-year
//! windows, completion and major labels, and the 2-slots-per-department
//! feature vectors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::data::{Dataset, Schema};
use crate::error::{Error, Result};

/// Input columns, in the order they are written.
pub const COLUMNS: [&str; 6] = [
    "student_id",
    "course_title",
    "department",
    "semester",
    "credit_value",
    "grade",
];

pub const COMPLETED: &str = "completed";
pub const DROPOUT: &str = "dropout";

/// Sums of fractional credits are compared with this slack.
const CREDIT_EPS: f64 = 1e-9;

/// Calendar order within a year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Winter,
    Summer,
    Fall,
}

impl Term {
    pub const ALL: [Term; 3] = [Term::Winter, Term::Summer, Term::Fall];

    fn letter(self) -> char {
        match self {
            Term::Winter => 'W',
            Term::Summer => 'S',
            Term::Fall => 'F',
        }
    }

    fn parse(s: &str) -> Option<Term> {
        match s.to_ascii_lowercase().as_str() {
            "w" | "winter" => Some(Term::Winter),
            "s" | "summer" => Some(Term::Summer),
            "f" | "fall" | "autumn" => Some(Term::Fall),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Semester {
    pub year: i32,
    pub term: Term,
}

impl Semester {
    pub fn new(year: i32, term: Term) -> Self {
        Semester { year, term }
    }

    /// Position in the winter, summer, fall cycle.
    pub fn ordinal(self) -> i64 {
        i64::from(self.year) * 3 + self.term as i64
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        let year = ordinal.div_euclid(3) as i32;
        Semester::new(year, Term::ALL[ordinal.rem_euclid(3) as usize])
    }
}

impl fmt::Display for Semester {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.year, self.term.letter())
    }
}

/// Accepts `2004F`, `2004 Fall`, `2004-fall` and `Fall 2004` (case-insensitive).
impl FromStr for Semester {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let err = || format!("unrecognized semester {s:?}");
        let digits_end = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
        let (year, term) = if digits_end > 0 {
            let rest = s[digits_end..].trim_start_matches([' ', '-']);
            (&s[..digits_end], rest)
        } else {
            let (term, year) = s.rsplit_once([' ', '-']).ok_or_else(err)?;
            (year.trim(), term.trim())
        };
        if year.len() != 4 || !year.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let term = Term::parse(term).ok_or_else(err)?;
        Ok(Semester::new(year.parse().map_err(|_| err())?, term))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradeRecord {
    pub student_id: String,
    pub course_title: String,
    pub department: String,
    pub semester: Semester,
    /// Full-course equivalents, > 0.
    pub credit_value: f64,
    /// 0 to 100.
    pub grade: f64,
}

impl GradeRecord {
    pub fn passed(&self, pass_mark: f64) -> bool {
        self.grade >= pass_mark
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reject {
    /// 1-based line in the input file (the header is line 1).
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedRecords {
    pub records: Vec<GradeRecord>,
    pub rejects: Vec<Reject>,
}

pub fn parse_records_path(path: impl AsRef<Path>) -> Result<ParsedRecords> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_records(file)
}

/// Parses the six-column grade file. Columns are matched by header name;
/// bad rows are collected as rejects, never dropped silently.
pub fn parse_records<R: Read>(reader: R) -> Result<ParsedRecords> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].trim().is_empty()) {
        // A completely empty file has no header to check.
        return Ok(ParsedRecords::default());
    }
    let mut idx = [0usize; 6];
    for (slot, name) in idx.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Schema(format!("missing column `{name}`")))?;
    }
    let mut out = ParsedRecords::default();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        match parse_row(&rec, &idx) {
            Ok(r) => out.records.push(r),
            Err(reason) => out.rejects.push(Reject { line, reason }),
        }
    }
    Ok(out)
}

fn parse_row(rec: &csv::StringRecord, idx: &[usize; 6]) -> std::result::Result<GradeRecord, String> {
    let field = |i: usize| {
        rec.get(idx[i])
            .map(str::trim)
            .ok_or_else(|| format!("missing field `{}`", COLUMNS[i]))
    };
    let student_id = field(0)?;
    if student_id.is_empty() {
        return Err("empty student_id".into());
    }
    let course_title = field(1)?;
    let department = field(2)?;
    if department.is_empty() {
        return Err("empty department".into());
    }
    let semester: Semester = field(3)?.parse()?;
    let credit_value: f64 = field(4)?
        .parse()
        .map_err(|_| format!("unparseable credit_value {:?}", field(4).unwrap_or("")))?;
    if !(credit_value > 0.0) || !credit_value.is_finite() {
        return Err("credit_value must be positive".into());
    }
    let grade: f64 = field(5)?
        .parse()
        .map_err(|_| format!("unparseable grade {:?}", field(5).unwrap_or("")))?;
    if !(0.0..=100.0).contains(&grade) {
        return Err("grade out of range".into());
    }
    Ok(GradeRecord {
        student_id: student_id.to_string(),
        course_title: course_title.to_string(),
        department: department.to_string(),
        semester,
        credit_value,
        grade,
    })
}

pub fn write_records<W: Write>(records: &[GradeRecord], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(COLUMNS)?;
    for r in records {
        wtr.write_record([
            r.student_id.as_str(),
            r.course_title.as_str(),
            r.department.as_str(),
            &r.semester.to_string(),
            &r.credit_value.to_string(),
            &r.grade.to_string(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestOptions {
    /// A course counts as completed when its grade is at least this.
    pub pass_mark: f64,
    pub completed_credits: f64,
    /// Minimum attempted credits to be considered at all; also closes the first-year window.
    pub min_attempted_credits: f64,
    /// Empty calendar semesters after the last record needed to call a dropout.
    pub dropout_gap: usize,
    pub include_summer: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            pass_mark: 50.0,
            completed_credits: 18.0,
            min_attempted_credits: 5.0,
            dropout_gap: 3,
            include_summer: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudentHistory {
    pub student_id: String,
    /// Sorted by semester; file order within a semester.
    pub records: Vec<GradeRecord>,
    pub total_attempted_credits: f64,
    pub total_completed_credits: f64,
}

impl StudentHistory {
    pub fn new(student_id: impl Into<String>, mut records: Vec<GradeRecord>, pass_mark: f64) -> Self {
        records.sort_by_key(|r| r.semester);
        let total_attempted_credits = records.iter().map(|r| r.credit_value).sum();
        let total_completed_credits = records
            .iter()
            .filter(|r| r.passed(pass_mark))
            .map(|r| r.credit_value)
            .sum();
        StudentHistory {
            student_id: student_id.into(),
            records,
            total_attempted_credits,
            total_completed_credits,
        }
    }

    pub fn last_semester(&self) -> Option<Semester> {
        self.records.last().map(|r| r.semester)
    }
}

/// Groups records by student, ordered by student id.
pub fn group_histories(records: &[GradeRecord], pass_mark: f64) -> Vec<StudentHistory> {
    let mut by_student: BTreeMap<&str, Vec<GradeRecord>> = BTreeMap::new();
    for r in records {
        by_student
            .entry(r.student_id.as_str())
            .or_default()
            .push(r.clone());
    }
    by_student
        .into_iter()
        .map(|(id, recs)| StudentHistory::new(id, recs, pass_mark))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstYearWindow {
    pub records: Vec<GradeRecord>,
    /// False when the whole history never reaches the threshold.
    pub reached: bool,
}

/// Whole semesters up to and including the first one at which cumulative
/// attempted credits reach `threshold`.
pub fn first_year_window(history: &StudentHistory, threshold: f64) -> FirstYearWindow {
    let mut cumulative = 0.0;
    let mut i = 0;
    let recs = &history.records;
    while i < recs.len() {
        let sem = recs[i].semester;
        while i < recs.len() && recs[i].semester == sem {
            cumulative += recs[i].credit_value;
            i += 1;
        }
        if cumulative + CREDIT_EPS >= threshold {
            return FirstYearWindow {
                records: recs[..i].to_vec(),
                reached: true,
            };
        }
    }
    FirstYearWindow {
        records: recs.clone(),
        reached: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Completion {
    Completed,
    Dropout,
    Excluded,
}

impl Completion {
    pub fn name(self) -> &'static str {
        match self {
            Completion::Completed => COMPLETED,
            Completion::Dropout => DROPOUT,
            Completion::Excluded => "excluded",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionDecision {
    pub label: Completion,
    pub reason: String,
}

/// Calendar semesters strictly after `last` up to and including `horizon`.
pub fn semesters_between(last: Semester, horizon: Semester, include_summer: bool) -> usize {
    (last.ordinal() + 1..=horizon.ordinal())
        .map(Semester::from_ordinal)
        .filter(|s| include_summer || s.term != Term::Summer)
        .count()
}

/// `horizon` is the latest semester present in the whole input file.
pub fn label_completion(
    history: &StudentHistory,
    horizon: Semester,
    options: &IngestOptions,
) -> CompletionDecision {
    let completed = history.total_completed_credits;
    let attempted = history.total_attempted_credits;
    if completed + CREDIT_EPS >= options.completed_credits {
        return CompletionDecision {
            label: Completion::Completed,
            reason: format!("completed credits {completed} >= {}", options.completed_credits),
        };
    }
    if attempted + CREDIT_EPS < options.min_attempted_credits {
        return CompletionDecision {
            label: Completion::Excluded,
            reason: format!("attempted<{}", options.min_attempted_credits),
        };
    }
    let gap = history
        .last_semester()
        .map_or(0, |last| semesters_between(last, horizon, options.include_summer));
    if gap >= options.dropout_gap {
        CompletionDecision {
            label: Completion::Dropout,
            reason: format!(
                "completed credits {completed} < {}, {gap} empty semesters after last record",
                options.completed_credits
            ),
        }
    } else {
        CompletionDecision {
            label: Completion::Excluded,
            reason: "right-censored".into(),
        }
    }
}

/// Department with the most completed credits over the entire history;
/// ties go to the lexicographically smallest code.
pub fn label_major(history: &StudentHistory, options: &IngestOptions) -> Result<String> {
    if history.total_completed_credits + CREDIT_EPS < options.completed_credits {
        return Err(Error::Contract(format!(
            "student {} did not complete; major is undefined",
            history.student_id
        )));
    }
    let mut per_dept: BTreeMap<&str, f64> = BTreeMap::new();
    for r in history.records.iter().filter(|r| r.passed(options.pass_mark)) {
        *per_dept.entry(r.department.as_str()).or_default() += r.credit_value;
    }
    let mut best: Option<(&str, f64)> = None;
    for (dept, credits) in per_dept {
        if best.is_none_or(|(_, b)| credits > b + CREDIT_EPS) {
            best = Some((dept, credits));
        }
    }
    Ok(best.expect("a completed student has passed courses").0.to_string())
}

/// `"DEPT"` (attempted credits) and `"DEPT G"` (mean grade) for each department.
pub fn feature_names(departments: &[String]) -> Vec<String> {
    departments
        .iter()
        .flat_map(|d| [d.clone(), format!("{d} G")])
        .collect()
}

/// Slot `2d` holds attempted credits in department `d`, slot `2d+1` the
/// unweighted mean grade there, or 0 when the window has no course in `d`.
pub fn build_features(window: &FirstYearWindow, departments: &[String]) -> Result<Vec<f64>> {
    let mut credits = vec![0.0; departments.len()];
    let mut grade_sum = vec![0.0; departments.len()];
    let mut courses = vec![0usize; departments.len()];
    for r in &window.records {
        let d = departments
            .iter()
            .position(|x| *x == r.department)
            .ok_or_else(|| Error::Input(format!("unknown department {:?}", r.department)))?;
        credits[d] += r.credit_value;
        grade_sum[d] += r.grade;
        courses[d] += 1;
    }
    let mut out = Vec::with_capacity(2 * departments.len());
    for d in 0..departments.len() {
        out.push(credits[d]);
        out.push(if courses[d] > 0 {
            grade_sum[d] / courses[d] as f64
        } else {
            0.0
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AuditCounts {
    pub completed: usize,
    pub dropout: usize,
    pub excluded: usize,
}

/// One line of `audit.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub student_id: String,
    pub label: Completion,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub major: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    pub departments: Vec<String>,
    pub horizon: Option<Semester>,
    /// Classes `completed` and `dropout`; one row per labeled student.
    pub completion: Dataset,
    /// One row per completed student; classes are the observed majors, sorted.
    pub major: Dataset,
    pub audit: AuditCounts,
    pub entries: Vec<AuditEntry>,
}

impl Cohort {
    pub fn audit_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e)?);
            out.push('\n');
        }
        Ok(out)
    }
}

pub fn build_cohort(records: &[GradeRecord], options: &IngestOptions) -> Result<Cohort> {
    let departments: Vec<String> = records
        .iter()
        .map(|r| r.department.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let horizon = records.iter().map(|r| r.semester).max();
    let histories = group_histories(records, options.pass_mark);
    let names = feature_names(&departments);

    let mut audit = AuditCounts::default();
    let mut entries = Vec::with_capacity(histories.len());
    let mut completion_rows = Vec::new();
    let mut major_rows: Vec<(Vec<f64>, String)> = Vec::new();
    for h in &histories {
        let horizon = horizon.expect("histories imply records");
        let decision = label_completion(h, horizon, options);
        let mut major = None;
        match decision.label {
            Completion::Completed => audit.completed += 1,
            Completion::Dropout => audit.dropout += 1,
            Completion::Excluded => audit.excluded += 1,
        }
        if decision.label != Completion::Excluded {
            let window = first_year_window(h, options.min_attempted_credits);
            let x = build_features(&window, &departments)?;
            let y = usize::from(decision.label == Completion::Dropout);
            if decision.label == Completion::Completed {
                let m = label_major(h, options)?;
                major_rows.push((x.clone(), m.clone()));
                major = Some(m);
            }
            completion_rows.push((x, y));
        }
        entries.push(AuditEntry {
            student_id: h.student_id.clone(),
            label: decision.label,
            reason: decision.reason,
            major,
        });
    }

    let completion_schema = Schema::new(names.clone(), vec![COMPLETED.into(), DROPOUT.into()])?;
    let completion = Dataset::from_rows(completion_schema, completion_rows)?;
    let majors: Vec<String> = major_rows
        .iter()
        .map(|(_, m)| m.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let major_rows = major_rows
        .into_iter()
        .map(|(x, m)| {
            let c = majors.binary_search(&m).expect("major collected above");
            (x, c)
        })
        .collect();
    let major = Dataset::from_rows(Schema::new(names, majors)?, major_rows)?;
    Ok(Cohort {
        departments,
        horizon,
        completion,
        major,
        audit,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, dept: &str, sem: &str, credit: f64, grade: f64) -> GradeRecord {
        GradeRecord {
            student_id: id.into(),
            course_title: format!("{dept} course"),
            department: dept.into(),
            semester: sem.parse().unwrap(),
            credit_value: credit,
            grade,
        }
    }

    #[test]
    fn semester_parsing() {
        let f = Semester::new(2004, Term::Fall);
        for s in ["2004F", "2004 Fall", "Fall 2004", "2004-fall", " fall 2004 "] {
            assert_eq!(s.parse::<Semester>().unwrap(), f, "{s}");
        }
        assert_eq!("2005W".parse::<Semester>().unwrap().to_string(), "2005W");
        assert!("2004X".parse::<Semester>().is_err());
        assert!("04F".parse::<Semester>().is_err());
        assert!(Semester::new(2004, Term::Fall) < Semester::new(2005, Term::Winter));
        assert!(Semester::new(2005, Term::Winter) < Semester::new(2005, Term::Summer));
    }

    #[test]
    fn semester_gap_enumeration() {
        let last = Semester::new(2004, Term::Fall);
        assert_eq!(semesters_between(last, Semester::new(2005, Term::Fall), true), 3);
        assert_eq!(semesters_between(last, Semester::new(2005, Term::Fall), false), 2);
        assert_eq!(semesters_between(last, last, true), 0);
        assert_eq!(semesters_between(last, Semester::new(2010, Term::Fall), true), 18);
    }

    #[test]
    fn parse_well_formed_and_rejects() {
        let text = "student_id,course_title,department,semester,credit_value,grade\n\
                    s1,Intro Chem,CHM,2004F,0.5,80\n\
                    s1,Calc,MAT,2004F,1.0,71.5\n\
                    s2,Poetry,ENG,2005W,0.5,64\n";
        let p = parse_records(text.as_bytes()).unwrap();
        assert_eq!(p.records.len(), 3);
        assert!(p.rejects.is_empty());

        let text = "student_id,course_title,department,semester,credit_value,grade\n\
                    s1,Intro Chem,CHM,2004F,0.5,-1\n\
                    s1,Calc,MAT,2004Q,1.0,70\n\
                    s1,Calc,MAT,2004F,zero,70\n";
        let p = parse_records(text.as_bytes()).unwrap();
        assert!(p.records.is_empty());
        assert_eq!(p.rejects[0], Reject { line: 2, reason: "grade out of range".into() });
        assert_eq!(p.rejects[1].line, 3);
        assert_eq!(p.rejects[2].line, 4);
    }

    #[test]
    fn header_only_and_missing_column() {
        let p = parse_records(COLUMNS.join(",").as_bytes()).unwrap();
        assert!(p.records.is_empty() && p.rejects.is_empty());
        let p = parse_records("".as_bytes()).unwrap();
        assert!(p.records.is_empty());
        let err = parse_records("student_id,course_title,department,semester,grade\n".as_bytes());
        assert!(matches!(err, Err(Error::Schema(m)) if m.contains("credit_value")));
    }

    #[test]
    fn write_then_parse_round_trip() {
        let records = vec![rec("a", "CHM", "2004F", 0.5, 80.0), rec("b", "MAT", "2005S", 1.0, 49.5)];
        let mut buf = Vec::new();
        write_records(&records, &mut buf).unwrap();
        let back = parse_records(buf.as_slice()).unwrap();
        assert_eq!(back.records, records);
    }

    #[test]
    fn completion_examples() {
        let o = IngestOptions::default();
        let horizon = Semester::new(2010, Term::Fall);
        let done = StudentHistory::new(
            "a",
            (0..18).map(|_| rec("a", "CHM", "2004F", 1.0, 75.0)).collect(),
            50.0,
        );
        assert_eq!(label_completion(&done, horizon, &o).label, Completion::Completed);

        let dropout = StudentHistory::new(
            "b",
            (0..6).map(|_| rec("b", "CHM", "2004F", 1.0, 75.0)).collect(),
            50.0,
        );
        assert_eq!(label_completion(&dropout, horizon, &o).label, Completion::Dropout);

        let light = StudentHistory::new(
            "c",
            (0..3).map(|_| rec("c", "CHM", "2004F", 1.0, 75.0)).collect(),
            50.0,
        );
        let d = label_completion(&light, horizon, &o);
        assert_eq!((d.label, d.reason.as_str()), (Completion::Excluded, "attempted<5"));

        // Last record two semesters before the horizon: still possibly active.
        let recent = label_completion(&dropout, Semester::new(2005, Term::Summer), &o);
        assert_eq!((recent.label, recent.reason.as_str()), (Completion::Excluded, "right-censored"));
    }

    #[test]
    fn major_examples() {
        let o = IngestOptions {
            completed_credits: 1.0,
            ..Default::default()
        };
        let mut recs: Vec<_> = (0..10).map(|_| rec("a", "CHM", "2004F", 1.0, 70.0)).collect();
        recs.extend((0..8).map(|_| rec("a", "MAT", "2004F", 1.0, 70.0)));
        assert_eq!(label_major(&StudentHistory::new("a", recs, 50.0), &o).unwrap(), "CHM");

        let mut recs: Vec<_> = (0..9).map(|_| rec("a", "ENG", "2004F", 1.0, 70.0)).collect();
        recs.extend((0..9).map(|_| rec("a", "CSC", "2004F", 1.0, 70.0)));
        assert_eq!(label_major(&StudentHistory::new("a", recs, 50.0), &o).unwrap(), "CSC");

        // Failed credits do not count toward the major.
        let mut recs: Vec<_> = (0..5).map(|_| rec("a", "ENG", "2004F", 1.0, 70.0)).collect();
        recs.extend((0..9).map(|_| rec("a", "CSC", "2004F", 1.0, 30.0)));
        assert_eq!(label_major(&StudentHistory::new("a", recs, 50.0), &o).unwrap(), "ENG");

        let few = StudentHistory::new("b", vec![rec("b", "ENG", "2004F", 0.5, 70.0)], 50.0);
        assert!(matches!(
            label_major(&few, &IngestOptions::default()),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn window_is_minimal_prefix_of_semesters() {
        let h = StudentHistory::new(
            "a",
            vec![
                rec("a", "MAT", "2005W", 2.5, 60.0),
                rec("a", "CHM", "2004F", 2.0, 80.0),
                rec("a", "CHM", "2005W", 0.5, 90.0),
                rec("a", "ENG", "2005F", 3.0, 70.0),
            ],
            50.0,
        );
        let w = first_year_window(&h, 5.0);
        assert!(w.reached);
        assert_eq!(w.records.len(), 3);
        assert!(w.records.iter().all(|r| r.semester <= "2005W".parse().unwrap()));
    }

    #[test]
    fn feature_examples() {
        let depts: Vec<String> = ["CHM", "ENG", "MAT"].iter().map(|s| s.to_string()).collect();
        let w = FirstYearWindow {
            records: vec![rec("a", "CHM", "2004F", 0.5, 80.0), rec("a", "CHM", "2004F", 0.5, 90.0)],
            reached: false,
        };
        assert_eq!(build_features(&w, &depts).unwrap(), vec![1.0, 85.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(feature_names(&depts)[..2], ["CHM".to_string(), "CHM G".to_string()]);
        let bad = FirstYearWindow {
            records: vec![rec("a", "XYZ", "2004F", 0.5, 80.0)],
            reached: true,
        };
        assert!(matches!(build_features(&bad, &depts), Err(Error::Input(m)) if m.contains("XYZ")));
    }

    #[test]
    fn cohort_small_cases() {
        let o = IngestOptions::default();
        let light = vec![rec("a", "CHM", "2004F", 1.0, 80.0), rec("b", "ENG", "2010F", 1.0, 80.0)];
        let c = build_cohort(&light, &o).unwrap();
        assert_eq!(c.audit, AuditCounts { completed: 0, dropout: 0, excluded: 2 });
        assert!(c.completion.is_empty() && c.major.is_empty());

        let mut two: Vec<_> = (0..18).map(|_| rec("a", "CHM", "2004F", 1.0, 80.0)).collect();
        two.extend((0..6).map(|_| rec("b", "ENG", "2004F", 1.0, 80.0)));
        two.push(rec("c", "MAT", "2010F", 0.5, 80.0));
        let c = build_cohort(&two, &o).unwrap();
        assert_eq!(c.completion.n_rows(), 2);
        assert_eq!(c.major.n_rows(), 1);
        assert_eq!(c.major.schema().class_names, vec!["CHM".to_string()]);
        assert_eq!(c.completion.labels(), &[0, 1]);

        let empty = build_cohort(&[], &o).unwrap();
        assert_eq!(empty.audit, AuditCounts::default());
        assert_eq!(empty.audit_jsonl().unwrap(), "");
    }
}
