//! Command-line driver: train a model from a corpus, parse sentences,
//! evaluate on held-out data, and inspect candidate lexical items.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use pccg::ccg::RuleSet;
use pccg::chart::{build_chart, ChartConfig};
use pccg::corpus::load_corpus;
use pccg::eval::evaluate;
use pccg::genlex::genlex;
use pccg::lambda::Ontology;
use pccg::learner::{load_model, save_model, train, LearnerConfig};
use pccg::model::SgdSchedule;

#[derive(Parser)]
#[command(name = "pccg", version, about = "CCG semantic parser trained from sentence/logical-form pairs", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Args)]
struct GlobalOpts {
    /// Per-cell beam width; 0 means unlimited (exact parsing)
    #[arg(long, global = true, default_value_t = 200)]
    beam: usize,

    /// Longest candidate phrase, in tokens
    #[arg(long, global = true, default_value_t = 4)]
    max_phrase_len: usize,

    /// Outer learning iterations (T)
    #[arg(long, global = true, default_value_t = 2)]
    iterations: usize,

    /// Gradient-ascent passes per estimation step (N)
    #[arg(long, global = true, default_value_t = 3)]
    sgd_passes: usize,

    /// Learning-rate numerator
    #[arg(long, global = true, default_value_t = 0.1)]
    alpha0: f64,

    /// Learning-rate decay
    #[arg(long, global = true, default_value_t = 0.001)]
    c: f64,

    /// Enable NP type-raising
    #[arg(long, global = true, default_value_t = false)]
    type_raising: bool,

    /// Disable forward/backward composition
    #[arg(long, global = true, default_value_t = false)]
    no_composition: bool,

    /// Reserved; the pipeline is deterministic and ignores it
    #[arg(long, global = true)]
    seed: Option<u64>,
}

impl GlobalOpts {
    fn chart_config(&self) -> ChartConfig {
        ChartConfig {
            beam: if self.beam == 0 { usize::MAX } else { self.beam },
            rules: RuleSet {
                composition: !self.no_composition,
                type_raising: self.type_raising,
            },
        }
    }

    fn learner_config(&self) -> LearnerConfig {
        LearnerConfig {
            iterations: self.iterations,
            sched: SgdSchedule {
                alpha0: self.alpha0,
                c: self.c,
                passes: self.sgd_passes,
            },
            chart: self.chart_config(),
            max_phrase_len: self.max_phrase_len,
            ..LearnerConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Learn a lexicon and weights from a training corpus
    Train {
        /// Training corpus (blank-line separated sentence/logical-form records)
        corpus: PathBuf,
        /// Ontology file (`name : type` lines)
        ontology: PathBuf,
        /// Seed lexicon (`phrase := category : term` lines)
        init_lexicon: PathBuf,
        /// Where to write the model
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the training report to a file
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Parse a sentence with a trained model
    Parse {
        model: PathBuf,
        sentence: String,
        /// Print the derivation tree(s) of the best form
        #[arg(long)]
        derivation: bool,
        /// Print every logical form tied for the best probability
        #[arg(long)]
        k_best_ties: bool,
    },
    /// Score a model against a corpus
    Evaluate {
        model: PathBuf,
        corpus: PathBuf,
    },
    /// Dump GENLEX candidates for every corpus record as TSV
    GenlexDump {
        corpus: PathBuf,
        ontology: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are successful outcomes; real usage
            // errors exit 1 with the synopsis on stderr.
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion)
            {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { corpus, ontology, init_lexicon, output, report } => {
            let ont = load_ontology(&ontology)?;
            let corpus = load_corpus(&corpus, &ont)?;
            let seed_text = std::fs::read_to_string(&init_lexicon)
                .with_context(|| init_lexicon.display().to_string())?;
            let seed = pccg::ccg::Lexicon::parse(&seed_text, &ont)
                .with_context(|| init_lexicon.display().to_string())?;
            let cfg = cli.opts.learner_config();
            let model = train(&corpus.examples, &seed, &cfg)?;
            std::fs::write(&output, save_model(&model, &ont))
                .with_context(|| output.display().to_string())?;
            let rendered = model.report.render();
            print!("{rendered}");
            println!("lexicon entries: {}", model.lexicon.len());
            println!("model written to {}", output.display());
            if let Some(path) = report {
                std::fs::write(&path, rendered)
                    .with_context(|| path.display().to_string())?;
            }
            Ok(())
        }
        Command::Parse { model, sentence, derivation, k_best_ties } => {
            let (mut model, _ont) = load_model_file(&model)?;
            model.chart = override_chart(model.chart, &cli.opts);
            let tokens = tokenize(&sentence)?;
            let chart = build_chart(&tokens, &model.lexicon, &model.params, &model.chart)?;
            let distribution = chart.logical_form_distribution();
            let Some((best, logp)) = distribution.first().cloned() else {
                println!("no parse");
                return Ok(());
            };
            println!("{best}");
            if k_best_ties {
                for (form, lp) in &distribution {
                    if (lp - logp).abs() <= 1e-9 * lp.abs().max(1.0) {
                        println!("tie: {form}  (p = {:.6})", lp.exp());
                    }
                }
            }
            if derivation {
                for (i, d) in chart.constrained_best(&best).iter().enumerate() {
                    if i > 0 {
                        println!();
                    }
                    println!("{}", d.pretty());
                }
            }
            Ok(())
        }
        Command::Evaluate { model, corpus } => {
            let (mut model, ont) = load_model_file(&model)?;
            model.chart = override_chart(model.chart, &cli.opts);
            let corpus = load_corpus(&corpus, &ont)?;
            let report = evaluate(&model, &corpus.examples)?;
            print!("{}", report.render_table());
            println!();
            print!("{}", report.render_machine());
            Ok(())
        }
        Command::GenlexDump { corpus, ontology } => {
            let ont = load_ontology(&ontology)?;
            let corpus = load_corpus(&corpus, &ont)?;
            println!("record\tphrase\tcategory\tsemantics\trule\tmatched");
            for (i, ex) in corpus.examples.iter().enumerate() {
                let set = genlex(&ex.tokens, &ex.logical_form, cli.opts.max_phrase_len);
                for (item, rule, matched) in set.rows() {
                    println!(
                        "{}\t{}\t{}\t{}\t{}\t{}",
                        i + 1,
                        item.phrase_text(),
                        item.cat.syn,
                        item.cat.sem,
                        rule,
                        matched
                    );
                }
            }
            Ok(())
        }
    }
}

fn load_ontology(path: &PathBuf) -> Result<Ontology> {
    let text =
        std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    Ok(Ontology::parse(&text).with_context(|| path.display().to_string())?)
}

fn load_model_file(path: &PathBuf) -> Result<(pccg::learner::TrainedModel, Ontology)> {
    let text =
        std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    Ok(load_model(&text).with_context(|| path.display().to_string())?)
}

/// Command-line chart flags override whatever the model file stored,
/// but only when the user actually passed them.
fn override_chart(saved: ChartConfig, opts: &GlobalOpts) -> ChartConfig {
    // clap fills defaults, so detect explicit use via the raw args.
    let raw: Vec<String> = std::env::args().collect();
    let mut cfg = saved;
    if raw.iter().any(|a| a == "--beam" || a.starts_with("--beam=")) {
        cfg.beam = if opts.beam == 0 { usize::MAX } else { opts.beam };
    }
    if raw.iter().any(|a| a == "--type-raising") {
        cfg.rules.type_raising = true;
    }
    if raw.iter().any(|a| a == "--no-composition") {
        cfg.rules.composition = false;
    }
    cfg
}

fn tokenize(sentence: &str) -> Result<Vec<String>> {
    let tokens: Vec<String> = sentence
        .split_whitespace()
        .map(|w| w.to_lowercase())
        .collect();
    if tokens.is_empty() {
        bail!("empty sentence");
    }
    Ok(tokens)
}
