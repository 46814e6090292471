use std::fs::File;
use std::io::{BufWriter, Write};

use bnsl::data::{fit_mle, forward_sample, partial_correlation, FittedNetwork};
use bnsl::graph::{compare, format_modelstring, to_dot, Graph};
use bnsl::priors::read_arc_file;
use bnsl::{
    ci_test, constraint_learn, hill_climb, network_score, Algorithm, DataKind, Dataset, HillClimbConfig, LearnConfig,
    PriorKnowledge, ScoreKind, ScoreSpec, TestKind,
};

use crate::graph_io::{arcs_text, emit, read_graph};
use crate::summary::render;
use crate::{CitestArgs, Command, CompareArgs, DataArgs, ExportArgs, Failure, Format, LearnArgs, SampleArgs, ScoreArgs};

type Outcome = std::result::Result<(), Failure>;

pub fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Learn(a) => learn(a),
        Command::Score(a) => score(a),
        Command::Citest(a) => citest(a),
        Command::Compare(a) => compare_graphs(a),
        Command::Sample(a) => sample(a),
        Command::ExportDot(a) => export(a, Format::Dot),
        Command::Modelstring(a) => export(a, Format::Modelstring),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn load(input: &DataArgs) -> std::result::Result<Dataset, Failure> {
    Ok(Dataset::load(&input.data, input.data_type.map(Into::into), None)?)
}

fn parse_label<T: std::str::FromStr<Err = bnsl::Error>>(s: &str) -> std::result::Result<T, Failure> {
    s.parse::<T>().map_err(|e| usage(e.to_string()))
}

fn score_spec(d: &Dataset, label: Option<&str>, iss: Option<f64>, penalty: Option<f64>) -> std::result::Result<ScoreSpec, Failure> {
    let kind = match label {
        Some(l) => parse_label::<ScoreKind>(l)?,
        None => ScoreKind::default_for(d.kind()),
    };
    let mut spec = ScoreSpec::new(kind);
    if let Some(i) = iss {
        spec = spec.with_iss(i);
    }
    if let Some(k) = penalty {
        spec = spec.with_penalty(k);
    }
    Ok(spec)
}

fn priors(a: &LearnArgs) -> std::result::Result<PriorKnowledge, Failure> {
    let read = |p: &Option<std::path::PathBuf>| -> std::result::Result<Vec<(String, String)>, Failure> {
        Ok(match p {
            Some(path) => read_arc_file(path)?,
            None => Vec::new(),
        })
    };
    Ok(PriorKnowledge::new(read(&a.whitelist)?, read(&a.blacklist)?))
}

fn check_learn_flags(a: &LearnArgs, hc: bool) -> Outcome {
    let mut misplaced = Vec::new();
    if hc {
        for (set, flag) in [(a.test.is_some(), "--test"), (a.alpha.is_some(), "--alpha"), (a.replicates.is_some(), "--B")] {
            if set {
                misplaced.push(flag);
            }
        }
    } else {
        for (set, flag) in [
            (a.score.is_some(), "--score"),
            (a.iss.is_some(), "--iss"),
            (a.penalty.is_some(), "--penalty"),
            (a.start.is_some(), "--start"),
            (a.restart.is_some(), "--restart"),
            (a.perturb.is_some(), "--perturb"),
        ] {
            if set {
                misplaced.push(flag);
            }
        }
    }
    if misplaced.is_empty() {
        Ok(())
    } else {
        let kind = if hc { "score-based" } else { "constraint-based" };
        Err(usage(format!("{} cannot be used with the {kind} algorithm '{}'", misplaced.join(", "), a.algo)))
    }
}

fn learn(a: LearnArgs) -> Outcome {
    let hc = a.algo == "hc";
    let algorithm = if hc { None } else { Some(parse_label::<Algorithm>(&a.algo)?) };
    check_learn_flags(&a, hc)?;
    if a.parallel == Some(0) {
        return Err(usage("--parallel needs at least one thread"));
    }
    let d = load(&a.input)?;
    let priors = priors(&a)?;

    let g = match algorithm {
        None => {
            let mut cfg = HillClimbConfig::new(score_spec(&d, a.score.as_deref(), a.iss, a.penalty)?);
            cfg.priors = priors;
            cfg.start = a.start.as_deref().map(|s| read_graph(s, Some(d.names()))).transpose()?;
            cfg.restarts = a.restart.unwrap_or(0);
            cfg.perturb = a.perturb.unwrap_or(1);
            cfg.optimized = a.optimized;
            cfg.seed = a.seed;
            cfg.debug = a.debug;
            match a.parallel {
                Some(n) => {
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(n)
                        .build()
                        .map_err(|e| usage(format!("thread pool: {e}")))?;
                    pool.install(|| hill_climb(&d, &cfg))?.0
                }
                None => hill_climb(&d, &cfg)?.0,
            }
        }
        Some(algorithm) => {
            let test = match &a.test {
                Some(t) => parse_label::<TestKind>(t)?,
                None => TestKind::default_for(d.kind()),
            };
            let mut cfg = LearnConfig::new(algorithm, test);
            if let Some(alpha) = a.alpha {
                cfg.alpha = alpha;
            }
            if let Some(b) = a.replicates {
                cfg.replicates = b;
            }
            cfg.priors = priors;
            cfg.optimized = a.optimized;
            cfg.parallelism = a.parallel.unwrap_or(1);
            cfg.seed = a.seed;
            cfg.debug = a.debug;
            constraint_learn(&d, &cfg)?.0
        }
    };

    match a.format {
        Format::Summary => {
            if let Some(path) = &a.out {
                emit(Some(path), &graph_text(&g))?;
            }
            emit(None, &render(&g))?;
        }
        other => emit(a.out.as_deref(), &formatted(&g, other)?)?,
    }
    Ok(())
}

// Model string when completely directed, arc list otherwise.
fn graph_text(g: &Graph) -> String {
    format_modelstring(g).unwrap_or_else(|_| arcs_text(g))
}

fn formatted(g: &Graph, format: Format) -> std::result::Result<String, Failure> {
    Ok(match format {
        Format::Modelstring => format_modelstring(g)?,
        Format::Arcs => arcs_text(g),
        Format::Dot => to_dot(g, "network"),
        Format::Summary => render(g),
    })
}

fn score(a: ScoreArgs) -> Outcome {
    let d = load(&a.input)?;
    let g = read_graph(&a.graph, Some(d.names()))?;
    let spec = score_spec(&d, a.score.as_deref(), a.iss, a.penalty)?;
    let value = network_score(&g, &d, &spec)?;
    emit(a.out.as_deref(), &format!("{value}"))?;
    Ok(())
}

fn p_value(p: f64) -> String {
    if p == 0.0 {
        "0".into()
    } else if p < 1e-4 {
        format!("{p:.3e}")
    } else {
        format!("{p:.4}")
    }
}

fn citest(a: CitestArgs) -> Outcome {
    let d = load(&a.input)?;
    let kind = match &a.test {
        Some(t) => parse_label::<TestKind>(t)?,
        None => TestKind::default_for(d.kind()),
    };
    let r = ci_test(&d, &a.x, &a.y, &a.given, kind, a.replicates, a.seed)?;
    let mut out = format!("\n\t{}\n\n", kind.description());
    let given = if a.given.is_empty() { String::new() } else { format!(" | {}", a.given.join(" + ")) };
    out.push_str(&format!("data:  {} ~ {}{given}\n", a.x, a.y));
    let mut fields = Vec::new();
    if kind.data_kind() == DataKind::Continuous {
        fields.push(format!("cor = {:.4}", partial_correlation(&d, &a.x, &a.y, &a.given)?));
    }
    let stat_name = match kind.parametric() {
        TestKind::Cor => "t",
        other => other.label(),
    };
    if r.infinite {
        fields.push(format!("{stat_name} = {}Inf", if r.statistic < 0.0 { "-" } else { "" }));
    } else {
        fields.push(format!("{stat_name} = {:.4}", r.statistic));
    }
    if let Some(df) = r.df {
        fields.push(format!("df = {df}"));
    }
    if let Some(b) = r.replicates {
        fields.push(format!("Monte Carlo samples = {b}"));
    }
    fields.push(format!("p-value = {}", p_value(r.p_value)));
    out.push_str(&fields.join(", "));
    out.push('\n');
    if kind.data_kind() == DataKind::Continuous {
        out.push_str("alternative hypothesis: true value is not equal to 0\n");
    }
    emit(a.out.as_deref(), &out)?;
    Ok(())
}

fn nodes_from(data: &Option<std::path::PathBuf>) -> std::result::Result<Option<Vec<String>>, Failure> {
    Ok(match data {
        Some(p) => Some(Dataset::load(p, None, None)?.names().to_vec()),
        None => None,
    })
}

fn compare_graphs(a: CompareArgs) -> Outcome {
    let nodes = nodes_from(&a.data)?;
    let first = read_graph(&a.first, nodes.as_deref())?;
    let second = read_graph(&a.second, nodes.as_deref())?;
    emit(a.out.as_deref(), &compare(&first, &second)?.to_string())?;
    Ok(())
}

fn sample(a: SampleArgs) -> Outcome {
    let net = match (&a.network, &a.graph, &a.data) {
        (Some(path), None, _) => FittedNetwork::from_json(&std::fs::read_to_string(path).map_err(bnsl::Error::from)?)?,
        (None, Some(graph), Some(data)) => {
            let d = Dataset::load(data, a.data_type.map(Into::into), None)?;
            fit_mle(&read_graph(graph, Some(d.names()))?, &d)?
        }
        _ => return Err(usage("sample needs either --network or both --graph and --data")),
    };
    if let Some(path) = &a.save_network {
        emit(Some(path), &net.to_json()?)?;
    }
    let rows = forward_sample(&net, a.n, a.seed)?;
    match &a.out {
        Some(path) => rows.write_to(BufWriter::new(File::create(path).map_err(bnsl::Error::from)?), b',')?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            rows.write_to(&mut lock, b',')?;
            lock.flush().map_err(bnsl::Error::from)?;
        }
    }
    Ok(())
}

fn export(a: ExportArgs, format: Format) -> Outcome {
    let nodes = nodes_from(&a.data)?;
    let g = read_graph(&a.graph, nodes.as_deref())?;
    emit(a.out.as_deref(), &formatted(&g, format)?)?;
    Ok(())
}
