use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use fairmanna::io::{allocation_from_json, instance_from_csv, instance_from_json, AllocationJson};
use fairmanna::paperlab::{claims_to_csv, gen_random_instance, verify_paper_claims, GenClass, GenConfig, GenModel};
use fairmanna::reductions::{reduce_x3c_jf1, reduce_x3c_jf1po_binary, X3cInstance};
use fairmanna::solvers::{
    assign_one_each, exists_allocation, jf1zero_greedy, solve_leximin, solve_leximin_pp, LexKey,
};
use fairmanna::{
    check_property, classify_item_additive, detect_problem_class, normalise, normalise_default, Allocation,
    Error, Instance, Limits, PropertyVariant, Rational,
};

#[derive(Parser)]
#[command(name = "fairmanna", version, about = "Fair division of mixed manna")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Item classes and the problem class.
    Classify {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Check one property of an allocation.
    Check {
        #[arg(long)]
        property: PropertyVariant,
        #[arg(long)]
        instance: PathBuf,
        /// Inline JSON or a path to a JSON file.
        #[arg(long)]
        allocation: String,
    },
    /// Compute an allocation.
    Solve {
        #[arg(long)]
        method: Method,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Search for an allocation with all the given properties.
    Exists {
        #[arg(long, value_delimiter = ',', required = true)]
        properties: Vec<PropertyVariant>,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Rescale every agent's total to the target (1 or -1 by default).
    Normalise {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        target: Option<Rational>,
    },
    /// Build a fair-division instance from an exact-cover instance.
    #[command(name = "reduce-x3c")]
    ReduceX3c {
        #[arg(long)]
        variant: Variant,
        #[arg(long = "in")]
        input: PathBuf,
        /// Penalty for the mixed variant; defaults to its minimum.
        #[arg(long, allow_negative_numbers = true)]
        m: Option<i64>,
    },
    /// Re-verify every finite claim; CSV unless --json.
    #[command(name = "verify-paper")]
    VerifyPaper {
        #[arg(long)]
        json: bool,
    },
    /// Random instance of a problem class.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        class: GenClass,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        max_abs: i64,
        #[arg(long)]
        normalise: bool,
        #[arg(long, default_value = "additive")]
        model: GenModel,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Leximin,
    Leximinpp,
    Jf1zero,
    OneEach,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Jf1,
    Jf1po,
}

/// Text to print and the exit code.
struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn json<T: Serialize>(value: &T, code: u8) -> Self {
        Output {
            text: serde_json::to_string_pretty(value).expect("output serializes") + "\n",
            code,
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Error> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let file = fs::File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        instance_from_csv(file)
    } else {
        instance_from_json(&read(path)?)
    }
}

fn load_allocation(inst: &Instance, arg: &str) -> Result<Allocation, Error> {
    if arg.trim_start().starts_with('{') {
        allocation_from_json(inst, arg)
    } else {
        allocation_from_json(inst, &read(Path::new(arg))?)
    }
}

fn solved(inst: &Instance, alloc: &Allocation, extra: serde_json::Value) -> serde_json::Value {
    let mut out = json!({
        "bundles": AllocationJson::new(inst, alloc).bundles,
        "utilities": alloc.utilities(inst),
    });
    if let (Some(o), Some(e)) = (out.as_object_mut(), extra.as_object()) {
        o.extend(e.clone());
    }
    out
}

fn run(command: Command, limits: Limits) -> Result<Output, Error> {
    match command {
        Command::Classify { instance } => {
            let inst = load_instance(&instance)?;
            let class = detect_problem_class(&inst, &limits)?;
            let items = if inst.is_additive() {
                let classes = (0..inst.items())
                    .map(|o| Ok(json!({ "item": inst.label(o), "class": classify_item_additive(&inst, o)? })))
                    .collect::<Result<Vec<_>, Error>>()?;
                serde_json::Value::Array(classes)
            } else {
                serde_json::Value::Null
            };
            Ok(Output::json(&json!({ "problem_class": class, "items": items }), 0))
        }
        Command::Check {
            property,
            instance,
            allocation,
        } => {
            let inst = load_instance(&instance)?;
            let alloc = load_allocation(&inst, &allocation)?;
            let verdict = check_property(&inst, &alloc, property, &limits)?;
            let code = if verdict.holds { 0 } else { 1 };
            Ok(Output::json(&verdict, code))
        }
        Command::Solve { method, instance } => {
            let inst = load_instance(&instance)?;
            let out = match method {
                Method::Leximin | Method::Leximinpp => {
                    let total = limits.allocation_count(inst.agents(), inst.items())?;
                    let alloc = match method {
                        Method::Leximin => solve_leximin(&inst, &limits)?,
                        _ => solve_leximin_pp(&inst, &limits)?,
                    };
                    let key = LexKey::of(&inst.evaluator(), alloc.bundles());
                    solved(
                        &inst,
                        &alloc,
                        json!({ "explored": total, "exhaustive": true, "key": key }),
                    )
                }
                Method::Jf1zero => solved(&inst, &jf1zero_greedy(&inst)?, json!({})),
                Method::OneEach => solved(&inst, &assign_one_each(&inst)?, json!({})),
            };
            Ok(Output::json(&out, 0))
        }
        Command::Exists { properties, instance } => {
            let inst = load_instance(&instance)?;
            let report = exists_allocation(&inst, &properties, &limits)?;
            let bundles = report.found.as_ref().map(|a| AllocationJson::new(&inst, a).bundles);
            let code = if bundles.is_some() { 0 } else { 1 };
            let out = json!({
                "found": bundles.is_some(),
                "bundles": bundles,
                "explored": report.explored,
                "exhaustive": report.exhaustive,
                "properties": report.properties,
            });
            Ok(Output::json(&out, code))
        }
        Command::Normalise { instance, target } => {
            let inst = load_instance(&instance)?;
            let norm = match target {
                Some(t) => normalise(&inst, t)?,
                None => normalise_default(&inst)?,
            };
            Ok(Output::json(&norm, 0))
        }
        Command::ReduceX3c { variant, input, m } => {
            let x3c = X3cInstance::from_json(&read(&input)?)?;
            let red = match variant {
                Variant::Jf1 => reduce_x3c_jf1(&x3c, m)?,
                Variant::Jf1po => {
                    if m.is_some() {
                        return Err(Error::BadParameters("--m applies to the jf1 variant only".into()));
                    }
                    reduce_x3c_jf1po_binary(&x3c)?
                }
            };
            Ok(Output::json(&red, 0))
        }
        Command::VerifyPaper { json } => {
            let reports = verify_paper_claims(&limits);
            let code = if reports.iter().all(|r| r.passed) { 0 } else { 1 };
            if json {
                Ok(Output::json(&reports, code))
            } else {
                Ok(Output {
                    text: claims_to_csv(&reports),
                    code,
                })
            }
        }
        Command::Gen {
            n,
            m,
            class,
            seed,
            max_abs,
            normalise,
            model,
        } => {
            let cfg = GenConfig {
                n,
                m,
                class,
                max_abs,
                normalise,
                model,
                seed,
            };
            Ok(Output::json(&gen_random_instance(&cfg)?, 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match Limits::from_env().and_then(|limits| run(cli.command, limits)) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(name: &str) -> String {
        format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    fn golden(name: &str) -> String {
        fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
    }

    /// `{data}` in an argument is replaced by the data directory.
    fn exec_with(args: &[&str], limits: Limits) -> Result<Output, Error> {
        let dir = data("");
        let args: Vec<String> = std::iter::once("fairmanna".to_string())
            .chain(args.iter().map(|a| a.replace("{data}", &dir)))
            .collect();
        run(Cli::try_parse_from(args).expect("valid arguments").command, limits)
    }

    fn exec(args: &[&str]) -> Result<Output, Error> {
        exec_with(args, Limits::default())
    }

    fn value(o: &Output) -> serde_json::Value {
        serde_json::from_str(&o.text).unwrap()
    }

    const CHECK_JFX: [&str; 7] = [
        "check",
        "--property",
        "JFX",
        "--instance",
        "{data}example2.json",
        "--allocation",
        r#"{"bundles":[["a","c"],["b"]]}"#,
    ];

    #[test]
    fn check_jfx_example2() {
        let o = exec(&CHECK_JFX).unwrap();
        assert_eq!(o.code, 1);
        assert_eq!(o.text, golden("check_jfx_example2.json"));
        assert_eq!(value(&o)["holds"], false);
    }

    #[test]
    fn solve_leximin_prop3() {
        let o = exec(&["solve", "--method", "leximin", "--instance", "{data}prop3.json"]).unwrap();
        assert_eq!(o.code, 0);
        assert_eq!(o.text, golden("solve_leximin_prop3.json"));
        assert_eq!(value(&o)["bundles"], json!([["a", "b", "d"], ["c"]]));
    }

    #[test]
    fn exists_jf1_prop1() {
        let o = exec(&["exists", "--properties", "JF1", "--instance", "{data}prop1.json"]).unwrap();
        assert_eq!(o.code, 1);
        assert_eq!(o.text, golden("exists_jf1_prop1.json"));
        let v = value(&o);
        assert_eq!(v["found"], false);
        assert_eq!(v["explored"], 8);
    }

    #[test]
    fn output_is_byte_stable() {
        let args = ["exists", "--properties", "JF1,PO", "--instance", "{data}prop3.json"];
        assert_eq!(exec(&args).unwrap().text, exec(&args).unwrap().text);
        assert_eq!(exec(&CHECK_JFX).unwrap().text, exec(&CHECK_JFX).unwrap().text);
    }

    #[test]
    fn allocation_from_file_and_true_verdict() {
        let alloc = data("example2_alloc.json");
        let o = exec(&["check", "--property", "jf1", "--instance", "{data}example2.json", "--allocation", &alloc]).unwrap();
        assert_eq!(o.code, 0);
        assert_eq!(value(&o)["holds"], true);
    }

    #[test]
    fn input_errors() {
        for args in [
            &["classify", "--instance", "{data}missing.json"][..],
            &["check", "--property", "JF1", "--instance", "{data}example2.json", "--allocation", r#"{"bundles":[["a"]]}"#],
            &["solve", "--method", "jf1zero", "--instance", "{data}prop1.json"],
            &["solve", "--method", "one-each", "--instance", "{data}example2.json"],
            &["reduce-x3c", "--variant", "jf1", "--in", "{data}seven.json", "--m", "16"],
            &["reduce-x3c", "--variant", "jf1po", "--in", "{data}seven.json", "--m", "30"],
            &["normalise", "--instance", "{data}example3.csv", "--target", "-2"],
        ] {
            let e = exec(args).err().unwrap_or_else(|| panic!("{args:?} succeeded"));
            assert_eq!(e.to_string().lines().count(), 1, "{args:?}");
        }
        for args in [
            &["fairmanna", "check", "--property", "JF9", "--instance", "x", "--allocation", "{}"][..],
            &["fairmanna", "gen", "--n", "2", "--m", "3", "--class", "chores"],
            &["fairmanna", "exists", "--instance", "x"],
        ] {
            assert!(Cli::try_parse_from(args).is_err(), "{args:?}");
        }
    }

    #[test]
    fn mixed_item_error_names_the_item() {
        let e = exec(&["solve", "--method", "jf1zero", "--instance", "{data}prop1.json"]).err().unwrap();
        assert!(matches!(e, Error::MixedItemEncountered { round: 1, ref item } if item == "a"), "{e}");
    }

    #[test]
    fn too_large_states_the_cap() {
        let e = exec_with(&["solve", "--method", "leximin", "--instance", "{data}prop3.json"], Limits::with_cap(4))
            .err()
            .unwrap();
        assert!(e.to_string().contains("cap of 4"), "{e}");
    }

    #[test]
    fn classify_csv_instance() {
        let o = exec(&["classify", "--instance", "{data}example3.csv"]).unwrap();
        let v = value(&o);
        assert_eq!(v["problem_class"], "without-mixed-items");
        assert_eq!(v["items"][0]["class"], "pure-good");
        assert_eq!(v["items"][1]["class"], "good");
    }

    #[test]
    fn normalise_example3() {
        let o = exec(&["normalise", "--instance", "{data}example3.csv"]).unwrap();
        let v = value(&o);
        assert_eq!(v["utilities"]["matrix"][0], json!(["1/4", "1/4", "1/4", "1/4"]));
        assert_eq!(v["utilities"]["matrix"][1], json!([1, 0, 0, 0]));
        let o = exec(&["normalise", "--instance", "{data}example3.csv", "--target", "4"]).unwrap();
        assert_eq!(value(&o)["utilities"]["matrix"][1], json!([4, 0, 0, 0]));
    }

    #[test]
    fn reduce_sizes() {
        let v = value(&exec(&["reduce-x3c", "--variant", "jf1", "--in", "{data}seven.json"]).unwrap());
        assert_eq!(v["instance"]["agents"], 8);
        assert_eq!(v["instance"]["items"].as_array().unwrap().len(), 25);
        assert_eq!(v["M"], 22);
        let v = value(&exec(&["reduce-x3c", "--variant", "jf1po", "--in", "{data}seven.json"]).unwrap());
        assert_eq!(v["instance"]["agents"], 7);
        assert_eq!(v["instance"]["items"].as_array().unwrap().len(), 21);
    }

    #[test]
    fn solve_methods() {
        let o = exec(&["solve", "--method", "leximinpp", "--instance", "{data}prop3.json"]).unwrap();
        assert_eq!(value(&o)["bundles"], json!([["b", "d"], ["a", "c"]]));
        let o = exec(&["solve", "--method", "jf1zero", "--instance", "{data}example2.json"]).unwrap();
        assert_eq!(value(&o)["bundles"], json!([["a", "c"], ["b"]]));
    }

    #[test]
    fn gen_is_seeded() {
        let args = ["gen", "--n", "3", "--m", "5", "--class", "mixed", "--seed", "9", "--normalise"];
        let a = exec(&args).unwrap();
        assert_eq!(a.text, exec(&args).unwrap().text);
        assert_eq!(value(&a)["agents"], 3);
        assert!(exec(&["gen", "--n", "1", "--m", "3", "--class", "goods"]).is_err());
    }

    #[test]
    fn verify_paper_csv_and_json() {
        let csv = exec(&["verify-paper"]).unwrap();
        assert!(csv.text.starts_with("claim_id,expected,computed,explored,millis,passed\n"));
        let json = exec(&["verify-paper", "--json"]).unwrap();
        let rows = value(&json);
        let rows = rows.as_array().unwrap();
        assert_eq!(rows.len(), csv.text.lines().count() - 1);
        let any_failed = rows.iter().any(|r| r["passed"] == false);
        assert_eq!(csv.code, u8::from(any_failed));
        assert_eq!(json.code, csv.code);
    }
}
