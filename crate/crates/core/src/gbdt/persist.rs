//! Line-based text persistence for fitted models.
//!
//! The format is versioned and self-describing: params, bin mapper, trees as
//! preorder node lists, base score, best round and eval history. Floats use
//! the shortest round-trip representation, so save → load → predict is
//! bit-identical.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::binning::{BinMapper, BinnedFeature, FeatureBins};
use super::tree::{Node, Tree};
use super::{GbdtError, GbdtModel, GbdtParams};

const MAGIC: &str = "tradecast gbdt model v1";

impl GbdtModel {
    pub fn save<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "target {}", self.target)?;
        let p = &self.params;
        writeln!(
            w,
            "params learning_rate={} num_leaves={} max_depth={} feature_fraction={} \
             early_stopping_rounds={} max_rounds={} min_data_in_leaf={} max_bins={} \
             lambda_l2={} seed={}",
            p.learning_rate,
            p.num_leaves,
            p.max_depth,
            p.feature_fraction,
            p.early_stopping_rounds,
            p.max_rounds,
            p.min_data_in_leaf,
            p.max_bins,
            p.lambda_l2,
            p.seed
        )?;
        writeln!(w, "base_score {}", self.base_score)?;
        writeln!(w, "best_round {}", self.best_round)?;
        let history: Vec<String> = self.eval_history.iter().map(|v| v.to_string()).collect();
        writeln!(w, "eval_history {}", history.join(" "))?;
        writeln!(w, "n_features {}", self.bin_mapper.features.len())?;
        for (i, feat) in self.bin_mapper.features.iter().enumerate() {
            match &feat.bins {
                FeatureBins::Numeric { cuts } => {
                    writeln!(w, "feature {i} numeric {}", feat.name)?;
                    let cuts: Vec<String> = cuts.iter().map(|c| c.to_string()).collect();
                    writeln!(w, "cuts {}", cuts.join(" "))?;
                }
                FeatureBins::Categorical { labels } => {
                    writeln!(w, "feature {i} categorical {}", feat.name)?;
                    writeln!(w, "labels {}", labels.len())?;
                    for label in labels {
                        writeln!(w, "label {label}")?;
                    }
                }
            }
        }
        writeln!(w, "n_trees {}", self.trees.len())?;
        for (i, tree) in self.trees.iter().enumerate() {
            writeln!(w, "tree {i} nodes {}", tree.nodes.len())?;
            for node in &tree.nodes {
                match node {
                    Node::Split {
                        feature,
                        threshold_bin,
                        missing_left,
                        gain,
                        left,
                        right,
                    } => {
                        let dir = if *missing_left { 'L' } else { 'R' };
                        writeln!(w, "split {feature} {threshold_bin} {dir} {gain} {left} {right}")?;
                    }
                    Node::Leaf { value, count } => writeln!(w, "leaf {value} {count}")?,
                }
            }
        }
        writeln!(w, "end")?;
        Ok(())
    }

    pub fn save_file(&self, path: &Path) -> Result<(), GbdtError> {
        let file = std::fs::File::create(path).map_err(|source| GbdtError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.save(std::io::BufWriter::new(file))
            .map_err(|source| GbdtError::Io {
                path: path.to_path_buf(),
                source,
            })
    }

    pub fn load_file(path: &Path) -> Result<GbdtModel, GbdtError> {
        let file = std::fs::File::open(path).map_err(|source| GbdtError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let reader = BufReader::new(file);
        let lines: Vec<String> = reader
            .lines()
            .collect::<Result<_, _>>()
            .map_err(|source| GbdtError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        parse_model(&lines)
    }
}

struct Cursor<'a> {
    lines: &'a [String],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self) -> Result<&'a str, GbdtError> {
        let line = self
            .lines
            .get(self.pos)
            .ok_or_else(|| GbdtError::ModelFormat("unexpected end of file".to_string()))?;
        self.pos += 1;
        Ok(line)
    }

    /// Next line, which must start with `keyword `; returns the remainder.
    fn expect(&mut self, keyword: &str) -> Result<&'a str, GbdtError> {
        let line = self.next()?;
        line.strip_prefix(keyword)
            .and_then(|rest| rest.strip_prefix(' ').or(Some(rest).filter(|r| r.is_empty())))
            .ok_or_else(|| GbdtError::ModelFormat(format!("expected `{keyword} ...`, found `{line}`")))
    }
}

fn bad(msg: impl Into<String>) -> GbdtError {
    GbdtError::ModelFormat(msg.into())
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, GbdtError> {
    s.parse().map_err(|_| bad(format!("bad {what}: `{s}`")))
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>, GbdtError> {
    s.split_whitespace().map(|t| parse_num(t, what)).collect()
}

fn parse_model(lines: &[String]) -> Result<GbdtModel, GbdtError> {
    let mut cur = Cursor { lines, pos: 0 };
    if cur.next()? != MAGIC {
        return Err(bad(format!("missing `{MAGIC}` header")));
    }
    let target = cur.expect("target")?.to_string();
    let params = parse_params(cur.expect("params")?)?;
    let base_score: f64 = parse_num(cur.expect("base_score")?, "base_score")?;
    let best_round: usize = parse_num(cur.expect("best_round")?, "best_round")?;
    let eval_history = parse_floats(cur.expect("eval_history")?, "eval_history")?;

    let n_features: usize = parse_num(cur.expect("n_features")?, "n_features")?;
    let mut features = Vec::with_capacity(n_features);
    for i in 0..n_features {
        let decl = cur.expect("feature")?;
        let mut parts = decl.splitn(3, ' ');
        let idx: usize = parse_num(parts.next().unwrap_or(""), "feature index")?;
        if idx != i {
            return Err(bad(format!("feature index {idx} out of order, expected {i}")));
        }
        let kind = parts.next().unwrap_or("");
        let name = parts.next().unwrap_or("").to_string();
        if name.is_empty() {
            return Err(bad(format!("feature {i} has no name")));
        }
        let bins = match kind {
            "numeric" => FeatureBins::Numeric {
                cuts: parse_floats(cur.expect("cuts")?, "cut")?,
            },
            "categorical" => {
                let n_labels: usize = parse_num(cur.expect("labels")?, "label count")?;
                let mut labels = Vec::with_capacity(n_labels);
                for _ in 0..n_labels {
                    labels.push(cur.expect("label")?.to_string());
                }
                FeatureBins::Categorical { labels }
            }
            other => return Err(bad(format!("unknown feature kind `{other}`"))),
        };
        features.push(BinnedFeature { name, bins });
    }

    let n_trees: usize = parse_num(cur.expect("n_trees")?, "n_trees")?;
    let mut trees = Vec::with_capacity(n_trees);
    for t in 0..n_trees {
        let decl = cur.expect("tree")?;
        let mut parts = decl.split_whitespace();
        let idx: usize = parse_num(parts.next().unwrap_or(""), "tree index")?;
        if idx != t {
            return Err(bad(format!("tree index {idx} out of order, expected {t}")));
        }
        if parts.next() != Some("nodes") {
            return Err(bad("expected `nodes` in tree header"));
        }
        let n_nodes: usize = parse_num(parts.next().unwrap_or(""), "node count")?;
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let line = cur.next()?;
            let mut fields = line.split_whitespace();
            match fields.next() {
                Some("split") => {
                    let feature: usize = parse_num(fields.next().unwrap_or(""), "split feature")?;
                    let threshold_bin: u16 =
                        parse_num(fields.next().unwrap_or(""), "split threshold")?;
                    let missing_left = match fields.next() {
                        Some("L") => true,
                        Some("R") => false,
                        other => return Err(bad(format!("bad missing direction {other:?}"))),
                    };
                    let gain: f64 = parse_num(fields.next().unwrap_or(""), "split gain")?;
                    let left: u32 = parse_num(fields.next().unwrap_or(""), "left child")?;
                    let right: u32 = parse_num(fields.next().unwrap_or(""), "right child")?;
                    if left as usize >= n_nodes || right as usize >= n_nodes {
                        return Err(bad("child index out of bounds"));
                    }
                    if feature >= n_features {
                        return Err(bad("split feature out of bounds"));
                    }
                    nodes.push(Node::Split {
                        feature,
                        threshold_bin,
                        missing_left,
                        gain,
                        left,
                        right,
                    });
                }
                Some("leaf") => {
                    let value: f64 = parse_num(fields.next().unwrap_or(""), "leaf value")?;
                    let count: u32 = parse_num(fields.next().unwrap_or(""), "leaf count")?;
                    nodes.push(Node::Leaf { value, count });
                }
                other => return Err(bad(format!("unknown node tag {other:?}"))),
            }
        }
        trees.push(Tree { nodes });
    }
    if cur.next()? != "end" {
        return Err(bad("missing `end` marker"));
    }

    Ok(GbdtModel {
        base_score,
        trees,
        params,
        bin_mapper: BinMapper { features },
        target,
        best_round,
        eval_history,
    })
}

fn parse_params(s: &str) -> Result<GbdtParams, GbdtError> {
    let mut params = GbdtParams::default();
    for pair in s.split_whitespace() {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| bad(format!("bad params entry `{pair}`")))?;
        match key {
            "learning_rate" => params.learning_rate = parse_num(value, key)?,
            "num_leaves" => params.num_leaves = parse_num(value, key)?,
            "max_depth" => params.max_depth = parse_num(value, key)?,
            "feature_fraction" => params.feature_fraction = parse_num(value, key)?,
            "early_stopping_rounds" => params.early_stopping_rounds = parse_num(value, key)?,
            "max_rounds" => params.max_rounds = parse_num(value, key)?,
            "min_data_in_leaf" => params.min_data_in_leaf = parse_num(value, key)?,
            "max_bins" => params.max_bins = parse_num(value, key)?,
            "lambda_l2" => params.lambda_l2 = parse_num(value, key)?,
            "seed" => params.seed = parse_num(value, key)?,
            other => return Err(bad(format!("unknown param `{other}`"))),
        }
    }
    Ok(params)
}
