//! Marching-squares iso-lines on a rectilinear grid.
//!
//! Crossing points live on grid edges; each cell links the crossings on its
//! border pairwise, and chains of links become polylines. Lines that reach the
//! grid border are open, all others closed (first point repeated at the end).
//! Output order depends only on the input.

pub type Point = [f64; 2];
pub type Polyline = Vec<Point>;

const NONE: usize = usize::MAX;

struct Edges {
    nx: usize,
    ny: usize,
}

impl Edges {
    // Edge between (i, j) and (i + 1, j).
    fn along_x(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    // Edge between (i, j) and (i, j + 1).
    fn along_y(&self, i: usize, j: usize) -> usize {
        (self.nx - 1) * self.ny + i * (self.ny - 1) + j
    }

    fn count(&self) -> usize {
        (self.nx - 1) * self.ny + self.nx * (self.ny - 1)
    }

    fn ends(&self, e: usize) -> ((usize, usize), (usize, usize)) {
        let split = (self.nx - 1) * self.ny;
        if e < split {
            let (i, j) = (e / self.ny, e % self.ny);
            ((i, j), (i + 1, j))
        } else {
            let e = e - split;
            let (i, j) = (e / (self.ny - 1), e % (self.ny - 1));
            ((i, j), (i, j + 1))
        }
    }
}

/// Iso-lines `f = level` of `field[i * ys.len() + j]` sampled at `(xs[i], ys[j])`.
///
/// A sample counts as inside when `f ≥ level`. Ambiguous saddle cells are
/// resolved by the mean of their four corners. Non-finite samples are not
/// allowed.
pub fn iso_lines(xs: &[f64], ys: &[f64], field: &[f64], level: f64) -> Vec<Polyline> {
    let (nx, ny) = (xs.len(), ys.len());
    assert_eq!(field.len(), nx * ny, "field size does not match the axes");
    assert!(field.iter().all(|f| f.is_finite()), "field must be finite");
    if nx < 2 || ny < 2 {
        return Vec::new();
    }
    let edges = Edges { nx, ny };
    let f = |i: usize, j: usize| field[i * ny + j];
    let inside = |i: usize, j: usize| f(i, j) >= level;

    // Up to two neighbours per crossing edge.
    let mut links = vec![[NONE; 2]; edges.count()];
    let mut link = |a: usize, b: usize| {
        for (from, to) in [(a, b), (b, a)] {
            let slot = if links[from][0] == NONE { 0 } else { 1 };
            links[from][slot] = to;
        }
    };

    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            let corners = [
                inside(i, j),
                inside(i + 1, j),
                inside(i + 1, j + 1),
                inside(i, j + 1),
            ];
            // Sides in cyclic order: bottom, right, top, left; side k joins corners k and k + 1.
            let sides = [
                edges.along_x(i, j),
                edges.along_y(i + 1, j),
                edges.along_x(i, j + 1),
                edges.along_y(i, j),
            ];
            let crossed: Vec<usize> = (0..4)
                .filter(|&k| corners[k] != corners[(k + 1) % 4])
                .collect();
            match crossed.len() {
                0 => {}
                2 => link(sides[crossed[0]], sides[crossed[1]]),
                4 => {
                    let centre = 0.25 * (f(i, j) + f(i + 1, j) + f(i + 1, j + 1) + f(i, j + 1));
                    if (centre >= level) == corners[0] {
                        // Corners 0 and 2 connect through the centre: cut off corners 1 and 3.
                        link(sides[0], sides[1]);
                        link(sides[2], sides[3]);
                    } else {
                        link(sides[3], sides[0]);
                        link(sides[1], sides[2]);
                    }
                }
                _ => unreachable!("sign changes around a cell come in pairs"),
            }
        }
    }

    let point = |e: usize| -> Point {
        let ((i0, j0), (i1, j1)) = edges.ends(e);
        let (f0, f1) = (f(i0, j0), f(i1, j1));
        let t = (level - f0) / (f1 - f0);
        [
            xs[i0] + t * (xs[i1] - xs[i0]),
            ys[j0] + t * (ys[j1] - ys[j0]),
        ]
    };

    let mut used = vec![false; edges.count()];
    let mut lines = Vec::new();
    let trace = |start: usize, used: &mut Vec<bool>| {
        let mut line = vec![point(start)];
        used[start] = true;
        let (mut prev, mut cur) = (NONE, start);
        loop {
            let next = links[cur]
                .into_iter()
                .find(|&n| n != NONE && n != prev && !used[n]);
            match next {
                Some(n) => {
                    used[n] = true;
                    line.push(point(n));
                    prev = cur;
                    cur = n;
                }
                None => {
                    if links[cur].contains(&start) && cur != start && line.len() > 2 {
                        line.push(line[0]);
                    }
                    return line;
                }
            }
        }
    };
    // Open lines start at a border crossing, closed ones anywhere.
    for e in 0..edges.count() {
        if !used[e] && links[e][0] != NONE && links[e][1] == NONE {
            lines.push(trace(e, &mut used));
        }
    }
    for e in 0..edges.count() {
        if !used[e] && links[e][0] != NONE {
            lines.push(trace(e, &mut used));
        }
    }
    lines
}

/// Whether a polyline ends where it starts.
pub fn is_closed(line: &[Point]) -> bool {
    line.len() > 2 && line.first() == line.last()
}
