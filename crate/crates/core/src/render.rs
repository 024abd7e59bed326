//! Raster frames (binary PPM) of a trajectory with region overlays.
//!
//! Nodes never on are small blue squares, nodes always on red squares, and
//! nodes that change state yellow rings, filled while on. Input nodes are
//! diamonds, white while on and black while off. Region disks from a
//! layout dump are drawn as rings: red for I, yellow for II, green for III.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::dynamics::StateVector;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::network::Network;
use crate::regions::Region;

pub type Rgb = [u8; 3];

const BACKGROUND: Rgb = [24, 24, 24];
const STATIC_OFF: Rgb = [40, 80, 200];
const STATIC_ON: Rgb = [210, 40, 40];
const CYCLING: Rgb = [240, 210, 40];
const INPUT_ON: Rgb = [255, 255, 255];
const INPUT_OFF: Rgb = [0, 0, 0];

fn region_color(r: Region) -> Rgb {
    match r {
        Region::I => [170, 40, 40],
        Region::II => [230, 200, 30],
        Region::III => [40, 170, 70],
    }
}

/// One region disk of a layout dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutDisk {
    pub step: usize,
    pub region: Region,
    pub center: Point,
    pub radius: f64,
}

/// Parses the `step label x y radius` lines written by
/// `RegionLayout::dump`.
pub fn parse_layout_dump(text: &str) -> Result<Vec<LayoutDisk>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Error::Parse(format!("layout dump line {}: {line:?}", n + 1));
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 {
            return Err(bad());
        }
        let region = match f[1] {
            "I" => Region::I,
            "II" => Region::II,
            "III" => Region::III,
            _ => return Err(bad()),
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        out.push(LayoutDisk {
            step: f[0].parse().map_err(|_| bad())?,
            region,
            center: Point::new(num(f[2])?, num(f[3])?),
            radius: num(f[4])?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Frame {
    fn new(size: usize) -> Self {
        Self { width: size, height: size, pixels: vec![BACKGROUND; size * size] }
    }

    fn put(&mut self, x: i64, y: i64, c: Rgb) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            let i = y as usize * self.width + x as usize;
            self.pixels[i] = c;
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    /// Binary PPM (P6).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        for px in &self.pixels {
            out.extend_from_slice(px);
        }
        out
    }

    /// Pixel coordinates of a unit-square point; y grows upward.
    fn to_px(&self, p: Point) -> (i64, i64) {
        let s = (self.width - 1) as f64;
        ((p.x * s).round() as i64, ((1.0 - p.y) * s).round() as i64)
    }

    fn square(&mut self, p: Point, half: i64, c: Rgb) {
        let (cx, cy) = self.to_px(p);
        for dy in -half..=half {
            for dx in -half..=half {
                self.put(cx + dx, cy + dy, c);
            }
        }
    }

    fn diamond(&mut self, p: Point, r: i64, c: Rgb) {
        let (cx, cy) = self.to_px(p);
        for dy in -r..=r {
            for dx in -r..=r {
                if dx.abs() + dy.abs() <= r {
                    self.put(cx + dx, cy + dy, c);
                }
            }
        }
    }

    fn disk(&mut self, p: Point, r: f64, filled: bool, c: Rgb) {
        let (cx, cy) = self.to_px(p);
        let ri = r.ceil() as i64 + 1;
        for dy in -ri..=ri {
            for dx in -ri..=ri {
                let d = ((dx * dx + dy * dy) as f64).sqrt();
                if (filled && d <= r) || (d <= r && d > r - 1.0) {
                    self.put(cx + dx, cy + dy, c);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    /// Frame side length in pixels.
    pub size: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { size: 400 }
    }
}

/// One frame per trajectory state. Layout disks tagged with step `s` are
/// drawn on frame `t` when `s == t mod (last step + 1)`.
pub fn render_frames(net: &Network, trajectory: &[StateVector], layout: &[LayoutDisk], opts: RenderOptions) -> Result<Vec<Frame>> {
    if opts.size < 8 {
        return Err(Error::InvalidParams("frame size must be >= 8 pixels".into()));
    }
    if let Some(s) = trajectory.iter().find(|s| s.len() != net.n_nodes()) {
        return Err(Error::Mismatch(format!("trajectory has {} nodes, network has {}", s.len(), net.n_nodes())));
    }
    let n = net.n_nodes();
    let mut ever = StateVector::zeros(n);
    let mut always = StateVector::from_active(n, &(0..n).collect::<Vec<_>>());
    for s in trajectory {
        ever.union_with(s);
        for i in 0..n {
            if !s.get(i) {
                always.set(i, false);
            }
        }
    }
    let layout_period = layout.iter().map(|d| d.step + 1).max().unwrap_or(1);
    let px_per_unit = (opts.size - 1) as f64;
    let marker = (opts.size / 200).max(1) as i64;
    let inputs = net.input_nodes();
    let mut frames = Vec::with_capacity(trajectory.len());
    for (t, state) in trajectory.iter().enumerate() {
        let mut f = Frame::new(opts.size);
        for d in layout.iter().filter(|d| d.step == t % layout_period) {
            f.disk(d.center, d.radius * px_per_unit, false, region_color(d.region));
        }
        for i in 0..n {
            if net.is_input(i) {
                continue;
            }
            let p = net.position(i);
            if !ever.get(i) {
                f.square(p, marker / 2, STATIC_OFF);
            } else if always.get(i) {
                f.square(p, marker, STATIC_ON);
            } else {
                f.disk(p, (2 * marker + 1) as f64, state.get(i), CYCLING);
            }
        }
        for &i in &inputs {
            f.diamond(net.position(i), 2 * marker + 1, if state.get(i) { INPUT_ON } else { INPUT_OFF });
        }
        frames.push(f);
    }
    Ok(frames)
}

/// Writes `frame_NNNNN.ppm` files and an `index.txt` manifest (`step file`
/// per line) into `dir`.
pub fn write_frames(dir: &Path, frames: &[Frame]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = String::new();
    let mut paths = Vec::with_capacity(frames.len());
    for (t, f) in frames.iter().enumerate() {
        let name = format!("frame_{t:05}.ppm");
        let path = dir.join(&name);
        std::fs::write(&path, f.to_ppm())?;
        let _ = writeln!(manifest, "{t} {name}");
        paths.push(path);
    }
    std::fs::write(dir.join("index.txt"), manifest)?;
    Ok(paths)
}
