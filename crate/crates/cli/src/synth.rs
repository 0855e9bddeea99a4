use std::path::PathBuf;

use awwsvm::{synth_two_gaussians, Dataset64};
use clap::Args;

use crate::error::{write_file, CliError, CliResult};

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 100)]
    pub n_pos: usize,
    #[arg(long, default_value_t = 100)]
    pub n_neg: usize,
    /// Distance between the two class means.
    #[arg(long, default_value_t = 2.0)]
    pub separation: f64,
    /// Fraction of labels to invert, in [0, 0.5).
    #[arg(long, default_value_t = 0.0)]
    pub flip: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; defaults to `<out>/synth.libsvm`.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, env = "AWWSVM_OUT", default_value = "out")]
    pub out: PathBuf,
}

pub fn run(args: &SynthArgs) -> CliResult<()> {
    let ds: Dataset64 = synth_two_gaussians(args.n_pos, args.n_neg, args.separation, args.flip, args.seed)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let path = args.output.clone().unwrap_or_else(|| args.out.join("synth.libsvm"));
    write_file(&path, &ds.to_libsvm())?;
    let conf = format!(
        "n_pos = {}\nn_neg = {}\nseparation = {}\nflip = {}\nseed = {}\noutput = {}\n",
        args.n_pos,
        args.n_neg,
        args.separation,
        args.flip,
        args.seed,
        path.display()
    );
    let mut conf_path = path.clone().into_os_string();
    conf_path.push(".conf");
    write_file(&PathBuf::from(conf_path), &conf)?;
    println!("wrote {} samples ({} positive) to {}", ds.len(), ds.n_pos(), path.display());
    Ok(())
}
