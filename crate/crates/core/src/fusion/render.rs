use image::{Rgb, RgbImage};

use super::{FusionError, OverlayResult};

pub const DOT_COLOR: Rgb<u8> = Rgb([0, 255, 0]);
pub const DEFAULT_DOT_RADIUS: u32 = 2;

/// Draws every overlay point as a green dot of [`DEFAULT_DOT_RADIUS`].
pub fn render_overlay(image: &RgbImage, overlay: &OverlayResult) -> Result<RgbImage, FusionError> {
    render_overlay_with_radius(image, overlay, DEFAULT_DOT_RADIUS)
}

/// Returns a copy of `image` with a filled disc of `radius` pixels centered
/// on each rounded overlay pixel. Radius 0 paints a single pixel. Discs are
/// clipped at the image border.
pub fn render_overlay_with_radius(image: &RgbImage, overlay: &OverlayResult, radius: u32) -> Result<RgbImage, FusionError> {
    let (w, h) = image.dimensions();
    if (w, h) != (overlay.image_width, overlay.image_height) {
        return Err(FusionError::DimensionMismatch {
            image_w: w,
            image_h: h,
            overlay_w: overlay.image_width,
            overlay_h: overlay.image_height,
        });
    }
    let mut out = image.clone();
    let r = radius as i64;
    for p in &overlay.projected {
        let cu = p.pixel.u.round() as i64;
        let cv = p.pixel.v.round() as i64;
        for dv in -r..=r {
            for du in -r..=r {
                if du * du + dv * dv > r * r {
                    continue;
                }
                let (x, y) = (cu + du, cv + dv);
                if x >= 0 && y >= 0 && x < w as i64 && y < h as i64 {
                    out.put_pixel(x as u32, y as u32, DOT_COLOR);
                }
            }
        }
    }
    Ok(out)
}
