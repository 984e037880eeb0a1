//! Ground-truth echo matcher for closure tests.
//!
//! Usage: `vpp-echo-matcher GT REF TGT SIDECAR OUT`
//!
//! Ignores both images and writes `b·f / z` of the ground-truth depth, shifted
//! right by the sidecar's `pad_left`, as the padded disparity map.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use vpp_complete::dataset::pfm::{read_map_pfm, write_map_pfm};
use vpp_complete::raster::{DepthMap, DisparityMap};
use vpp_complete::sgm::Sidecar;

#[derive(Parser)]
#[command(version, about = "Echo ground-truth disparity through the external matcher contract")]
struct Args {
    gt: PathBuf,
    reference: PathBuf,
    target: PathBuf,
    sidecar: PathBuf,
    out: PathBuf,
}

fn run(args: &Args) -> vpp_complete::error::Result<()> {
    let side = Sidecar::<f32>::load(&args.sidecar)?;
    let (gt, _): (DepthMap<f32>, _) = read_map_pfm(&args.gt)?;
    if gt.width() + side.pad_left != side.width || gt.height() != side.height {
        return Err(vpp_complete::error::Error::Input(format!(
            "ground truth {}x{} does not fit pair {}x{} with padding {}",
            gt.width(),
            gt.height(),
            side.width,
            side.height,
            side.pad_left
        )));
    }
    let mut out = DisparityMap::<f32>::new(side.width, side.height);
    for (x, y, z) in gt.iter_valid() {
        out.set(x + side.pad_left, y, side.baseline * side.focal / z)?;
    }
    write_map_pfm(&args.out, &out)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vpp-echo-matcher: {e}");
            ExitCode::FAILURE
        }
    }
}
