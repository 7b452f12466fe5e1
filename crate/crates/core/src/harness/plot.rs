//! Minimal raster line plots. Axes run from 0 to the data maximum; there are
//! no text labels, the CSV next to each image carries the numbers.

use std::path::Path;

use image::{Rgb, RgbImage};

use crate::error::{ArselError, Result};

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: u32 = 900;
const HEIGHT: u32 = 560;
const MARGIN: u32 = 50;
const PALETTE: [[u8; 3]; 8] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [23, 190, 207],
];

fn put_thick(img: &mut RgbImage, x: i64, y: i64, color: Rgb<u8>) {
    for dx in -1..=1 {
        for dy in -1..=1 {
            let (px, py) = (x + dx, y + dy);
            if px >= 0 && py >= 0 && (px as u32) < WIDTH && (py as u32) < HEIGHT {
                img.put_pixel(px as u32, py as u32, color);
            }
        }
    }
}

fn segment(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), color: Rgb<u8>) {
    let steps = (x1 - x0).abs().max((y1 - y0).abs()).max(1);
    for s in 0..=steps {
        let x = x0 + (x1 - x0) * s / steps;
        let y = y0 + (y1 - y0) * s / steps;
        put_thick(img, x, y, color);
    }
}

/// Draws each series as a polyline, colored in order, and saves a PNG.
pub fn line_plot(series: &[Series], path: &Path) -> Result<()> {
    let finite = series
        .iter()
        .flat_map(|s| &s.points)
        .filter(|(x, y)| x.is_finite() && y.is_finite());
    let (x_max, y_max) = finite.fold((0f64, 0f64), |(a, b), &(x, y)| (a.max(x), b.max(y)));
    if x_max <= 0.0 {
        return Err(ArselError::Empty("plot data"));
    }
    let y_max = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };
    let mut img = RgbImage::from_pixel(WIDTH, HEIGHT, Rgb([255, 255, 255]));
    let (w, h) = ((WIDTH - 2 * MARGIN) as f64, (HEIGHT - 2 * MARGIN) as f64);
    let to_px = |(x, y): (f64, f64)| {
        (
            MARGIN as i64 + (x / x_max * w).round() as i64,
            (HEIGHT - MARGIN) as i64 - (y / y_max * h).round() as i64,
        )
    };
    let axis = Rgb([0, 0, 0]);
    segment(&mut img, to_px((0.0, 0.0)), to_px((x_max, 0.0)), axis);
    segment(&mut img, to_px((0.0, 0.0)), to_px((0.0, y_max)), axis);
    for (i, s) in series.iter().enumerate() {
        let color = Rgb(PALETTE[i % PALETTE.len()]);
        let pts: Vec<_> = s
            .points
            .iter()
            .copied()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(to_px)
            .collect();
        for pair in pts.windows(2) {
            segment(&mut img, pair[0], pair[1], color);
        }
    }
    img.save(path)?;
    Ok(())
}
