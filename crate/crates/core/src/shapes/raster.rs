use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::Contour;
use crate::error::{PfsdmError, Result};
use crate::geometry::{self, Point};

/// Square grayscale image with intensities in `[0, 1]`, row-major, row 0 at
/// the top.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

pub const MIN_RASTER_SIZE: usize = 32;

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width != height || width < MIN_RASTER_SIZE {
            return Err(PfsdmError::Format(format!(
                "raster must be square with side >= {MIN_RASTER_SIZE}, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(PfsdmError::Format(format!(
                "expected {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        if pixels.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(PfsdmError::Format("pixel intensities must lie in [0,1]".into()));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(side: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(side * side);
        for r in 0..side {
            for c in 0..side {
                pixels.push(f(r, c));
            }
        }
        Self::new(side, side, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Reads a plain (P2) or binary (P5) PGM.
    pub fn read_pgm(mut reader: impl BufRead) -> Result<Self> {
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        let mut pos = 0usize;
        let mut token = |bytes: &[u8]| -> Result<String> {
            loop {
                while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos < bytes.len() && bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                    continue;
                }
                break;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(PfsdmError::Format("unexpected end of PGM header".into()));
            }
            Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
        };
        let magic = token(&bytes)?;
        let num = |s: String| -> Result<usize> {
            s.parse()
                .map_err(|_| PfsdmError::Format(format!("bad PGM number `{s}`")))
        };
        let width = num(token(&bytes)?)?;
        let height = num(token(&bytes)?)?;
        let maxval = num(token(&bytes)?)?;
        if maxval == 0 || maxval > 65535 {
            return Err(PfsdmError::Format(format!("bad PGM maxval {maxval}")));
        }
        let n = width * height;
        let scale = 1.0 / maxval as f64;
        let pixels = match magic.as_str() {
            "P2" => (0..n)
                .map(|_| token(&bytes).and_then(num).map(|v| v as f64 * scale))
                .collect::<Result<Vec<_>>>()?,
            "P5" => {
                // exactly one whitespace byte separates the header from the data
                let data = &bytes[(pos + 1).min(bytes.len())..];
                let bpp = if maxval < 256 { 1 } else { 2 };
                if data.len() < n * bpp {
                    return Err(PfsdmError::Format("truncated P5 pixel data".into()));
                }
                (0..n)
                    .map(|i| {
                        let v = if bpp == 1 {
                            data[i] as usize
                        } else {
                            (data[2 * i] as usize) << 8 | data[2 * i + 1] as usize
                        };
                        v as f64 * scale
                    })
                    .collect()
            }
            other => return Err(PfsdmError::Format(format!("unsupported PGM magic `{other}`"))),
        };
        Self::new(width, height, pixels)
    }

    /// Writes a plain (P2) PGM with maxval 255.
    pub fn write_pgm(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "P2")?;
        writeln!(w, "{} {}", self.width, self.height)?;
        writeln!(w, "255")?;
        for row in self.pixels.chunks(self.width) {
            let line: Vec<String> = row
                .iter()
                .map(|v| ((v * 255.0).round() as u32).to_string())
                .collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Renders the filled contour on a `side`x`side` grid covering `(-1,1)^2`.
/// Pixel centers inside the polygon get intensity 1.
pub fn rasterize(c: &Contour, side: usize) -> Result<RasterImage> {
    let h = 2.0 / side as f64;
    RasterImage::from_fn(side, |r, col| {
        let q = Point::new(-1.0 + (col as f64 + 0.5) * h, 1.0 - (r as f64 + 0.5) * h);
        if c.contains(q) {
            1.0
        } else {
            0.0
        }
    })
}

/// Maps pixel-unit contour coordinates from [`extract_contour`] to the
/// `(-1,1)^2` frame used by [`rasterize`].
pub fn pixel_to_domain(c: &Contour, side: usize) -> Result<Contour> {
    let h = 2.0 / side as f64;
    Contour::new(c.map(|p| Point::new(-1.0 + (p.x + 0.5) * h, -1.0 + (p.y + 0.5) * h)))
}

fn count_components(mask: &[bool], side: usize) -> usize {
    let mut seen = vec![false; mask.len()];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (r, c) = ((i / side) as isize, (i % side) as isize);
            for dr in -1..=1 {
                for dc in -1..=1 {
                    let (nr, nc) = (r + dr, c + dc);
                    if nr < 0 || nc < 0 || nr >= side as isize || nc >= side as isize {
                        continue;
                    }
                    let j = nr as usize * side + nc as usize;
                    if mask[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    count
}

/// Marching-squares outer boundary of the single foreground region
/// (`intensity >= threshold`).
///
/// Output coordinates are in pixel units with `x` = column and `y` pointing
/// up (`y = height - 1 - row`), counterclockwise.
pub fn extract_contour(img: &RasterImage, threshold: f64) -> Result<Contour> {
    let side = img.width();
    let mask: Vec<bool> = img.pixels().iter().map(|&v| v >= threshold).collect();
    let components = count_components(&mask, side);
    if components != 1 {
        return Err(PfsdmError::MultipleComponents(components));
    }
    let touches = (0..side).any(|k| {
        mask[k] || mask[(side - 1) * side + k] || mask[k * side] || mask[k * side + side - 1]
    });
    if touches {
        return Err(PfsdmError::BorderContact);
    }

    // Edge keys: (row, col, 0) joins (r,c)-(r,c+1); (row, col, 1) joins (r,c)-(r+1,c).
    type EdgeKey = (usize, usize, u8);
    let inside = |r: usize, c: usize| mask[r * side + c];
    let crossing = |key: EdgeKey| -> Point {
        let (r, c, dir) = key;
        let (r1, c1) = if dir == 0 { (r, c + 1) } else { (r + 1, c) };
        let (v0, v1) = (img.get(r, c), img.get(r1, c1));
        let t = ((threshold - v0) / (v1 - v0)).clamp(0.0, 1.0);
        let row = r as f64 + t * (r1 as f64 - r as f64);
        let col = c as f64 + t * (c1 as f64 - c as f64);
        Point::new(col, (side - 1) as f64 - row)
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for r in 0..side - 1 {
        for c in 0..side - 1 {
            let corners = [inside(r, c), inside(r, c + 1), inside(r + 1, c + 1), inside(r + 1, c)];
            let edges: [EdgeKey; 4] = [(r, c, 0), (r, c + 1, 1), (r + 1, c, 0), (r, c, 1)];
            let crossed: Vec<usize> = (0..4)
                .filter(|&e| corners[e] != corners[(e + 1) % 4])
                .collect();
            match crossed.len() {
                2 => segments.push((edges[crossed[0]], edges[crossed[1]])),
                4 => {
                    let center = 0.25
                        * (img.get(r, c) + img.get(r, c + 1) + img.get(r + 1, c + 1) + img.get(r + 1, c));
                    if (center >= threshold) == corners[0] {
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }

    let mut by_edge: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (i, &(a, b)) in segments.iter().enumerate() {
        by_edge.entry(a).or_default().push(i);
        by_edge.entry(b).or_default().push(i);
    }
    let mut used = vec![false; segments.len()];
    let mut best: Option<(f64, Vec<Point>)> = None;
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (first, mut edge) = segments[start];
        let mut ring = vec![crossing(first)];
        while edge != first {
            ring.push(crossing(edge));
            let next = by_edge[&edge].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (a, b) = segments[s];
            edge = if a == edge { b } else { a };
        }
        ring.dedup();
        while ring.len() > 1 && ring.first() == ring.last() {
            ring.pop();
        }
        let area = geometry::signed_area(&ring).abs();
        if ring.len() >= 3 && best.as_ref().is_none_or(|(a, _)| area > *a) {
            best = Some((area, ring));
        }
    }
    let (_, mut ring) = best.ok_or_else(|| PfsdmError::DegenerateShape("no boundary found".into()))?;
    if geometry::signed_area(&ring) < 0.0 {
        ring.reverse();
    }
    Contour::new(ring)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(side: usize, cx: f64, cy: f64, radius: f64) -> impl Fn(usize, usize) -> f64 {
        move |r, c| {
            let (dx, dy) = (c as f64 - cx, r as f64 - cy);
            if dx * dx + dy * dy <= radius * radius && r < side {
                1.0
            } else {
                0.0
            }
        }
    }

    #[test]
    fn disk_contour_radius() {
        let img = RasterImage::from_fn(64, disk(64, 32.0, 32.0, 20.0)).unwrap();
        let c = extract_contour(&img, 0.5).unwrap();
        assert!(c.is_counterclockwise());
        assert!((100..=180).contains(&c.len()), "{} points", c.len());
        // y axis is flipped: row 32 maps to y = 63 - 32 = 31
        let center = Point::new(32.0, 31.0);
        for p in c.points() {
            let r = p.distance(center);
            assert!((r - 20.0).abs() < 1.0, "radius {r}");
        }
    }

    #[test]
    fn empty_image_has_no_component() {
        let img = RasterImage::from_fn(32, |_, _| 0.0).unwrap();
        assert!(matches!(extract_contour(&img, 0.5), Err(PfsdmError::MultipleComponents(0))));
    }

    #[test]
    fn two_disks_rejected() {
        let a = disk(64, 16.0, 16.0, 6.0);
        let b = disk(64, 46.0, 46.0, 6.0);
        let img = RasterImage::from_fn(64, |r, c| a(r, c).max(b(r, c))).unwrap();
        assert!(matches!(extract_contour(&img, 0.5), Err(PfsdmError::MultipleComponents(2))));
    }

    #[test]
    fn border_contact_rejected() {
        let img = RasterImage::from_fn(32, disk(32, 0.0, 16.0, 8.0)).unwrap();
        assert!(matches!(extract_contour(&img, 0.5), Err(PfsdmError::BorderContact)));
    }

    #[test]
    fn raster_must_be_square() {
        assert!(RasterImage::new(32, 33, vec![0.0; 32 * 33]).is_err());
        assert!(RasterImage::new(16, 16, vec![0.0; 256]).is_err());
    }

    #[test]
    fn pgm_round_trip_plain_and_binary() {
        let img = RasterImage::from_fn(32, disk(32, 16.0, 16.0, 9.0)).unwrap();
        let mut buf = Vec::new();
        img.write_pgm(&mut buf).unwrap();
        assert_eq!(RasterImage::read_pgm(&buf[..]).unwrap(), img);

        let mut p5 = b"P5\n# comment\n32 32\n255\n".to_vec();
        p5.extend(img.pixels().iter().map(|v| (v * 255.0) as u8));
        assert_eq!(RasterImage::read_pgm(&p5[..]).unwrap(), img);
        assert!(RasterImage::read_pgm(&b"P3\n1 1\n255\n0"[..]).is_err());
    }

    #[test]
    fn rasterize_then_extract_recovers_shape() {
        let shape = super::super::generate_shape(super::super::ShapeKind::Star, 256, 0).unwrap();
        let img = rasterize(&shape, 128).unwrap();
        let c = extract_contour(&img, 0.5).unwrap();
        let n = super::super::normalize_contour(&c).unwrap();
        // area ratio is preserved up to pixelization
        let ratio = n.signed_area() / shape.signed_area();
        assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn pixel_frame_matches_raster_frame() {
        let shape = super::super::generate_shape(super::super::ShapeKind::Circle, 256, 0).unwrap();
        let img = rasterize(&shape, 200).unwrap();
        let c = pixel_to_domain(&extract_contour(&img, 0.5).unwrap(), 200).unwrap();
        let h = 2.0 / 200.0;
        for p in c.points() {
            assert!((p.norm() - 0.7).abs() < h, "{p:?}");
        }
        let centroid = c.centroid().unwrap();
        assert!(centroid.norm() < 0.1 * h);
    }
}
