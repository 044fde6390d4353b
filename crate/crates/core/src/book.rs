// The guide's `rust` listings, run as doc-tests. One module per chapter so a
// failure names the chapter it came from.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/camera-model.md")]
mod camera_model {}
#[doc = include_str!("../../../book/src/rotations.md")]
mod rotations {}
#[doc = include_str!("../../../book/src/calibration.md")]
mod calibration {}
#[doc = include_str!("../../../book/src/fusion-accuracy.md")]
mod fusion_accuracy {}
#[doc = include_str!("../../../book/src/ingest.md")]
mod ingest {}
#[doc = include_str!("../../../book/src/kinematics.md")]
mod kinematics {}
#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
#[doc = include_str!("../../../book/src/http-api.md")]
mod http_api {}
#[doc = include_str!("../../../book/src/file-formats.md")]
mod file_formats {}
