use rand::Rng;

use crate::image::Image;

/// Element of the 8-element symmetry group of the square: an optional horizontal
/// flip followed by `k` counter-clockwise quarter turns, encoded as `flip * 4 + k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dihedral(u8);

impl Dihedral {
    pub const IDENTITY: Dihedral = Dihedral(0);
    pub const ALL: [Dihedral; 8] =
        [Dihedral(0), Dihedral(1), Dihedral(2), Dihedral(3), Dihedral(4), Dihedral(5), Dihedral(6), Dihedral(7)];

    pub fn new(flip: bool, quarter_turns: u8) -> Self {
        Dihedral(flip as u8 * 4 + quarter_turns % 4)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn flip(self) -> bool {
        self.0 >= 4
    }

    pub fn quarter_turns(self) -> u8 {
        self.0 % 4
    }

    pub fn random(rng: &mut impl Rng) -> Self {
        Dihedral(rng.gen_range(0..8))
    }

    pub fn inverse(self) -> Self {
        if self.flip() {
            // flip-then-rotate is a reflection, so it undoes itself
            self
        } else {
            Dihedral((4 - self.0) % 4)
        }
    }

    /// Transform a row-major `w x h` raster; returns the new raster and its extents.
    pub fn apply_raster<T: Copy>(self, src: &[T], w: usize, h: usize) -> (Vec<T>, usize, usize) {
        assert_eq!(src.len(), w * h);
        let mut cur: Vec<T> = if self.flip() {
            (0..h).flat_map(|y| (0..w).rev().map(move |x| (x, y))).map(|(x, y)| src[y * w + x]).collect()
        } else {
            src.to_vec()
        };
        let (mut cw, mut ch) = (w, h);
        for _ in 0..self.quarter_turns() {
            // counter-clockwise: out[y'][x'] = in[x'][cw - 1 - y'], new extents ch x cw
            let mut next = Vec::with_capacity(cur.len());
            for yo in 0..cw {
                for xo in 0..ch {
                    next.push(cur[xo * cw + (cw - 1 - yo)]);
                }
            }
            cur = next;
            std::mem::swap(&mut cw, &mut ch);
        }
        (cur, cw, ch)
    }

    pub fn apply(self, image: &Image) -> Image {
        if self == Dihedral::IDENTITY {
            return image.clone();
        }
        let (w, h) = (image.width(), image.height());
        let mut extents = (w, h);
        let planes = image.map_planes(|p| {
            let (out, nw, nh) = self.apply_raster(p, w, h);
            extents = (nw, nh);
            out
        });
        Image::from_planes(extents.0, extents.1, planes, image.colorspace())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turn_moves_top_right_to_top_left() {
        // 3 x 2 raster: 0 1 2 / 3 4 5
        let (out, w, h) = Dihedral::new(false, 1).apply_raster(&[0, 1, 2, 3, 4, 5], 3, 2);
        assert_eq!((w, h), (2, 3));
        assert_eq!(out, vec![2, 5, 1, 4, 0, 3]);
    }

    #[test]
    fn inverse_undoes_every_element() {
        let src: Vec<u32> = (0..12).collect();
        for d in Dihedral::ALL {
            let (t, w, h) = d.apply_raster(&src, 4, 3);
            let (back, bw, bh) = d.inverse().apply_raster(&t, w, h);
            assert_eq!((back, bw, bh), (src.clone(), 4, 3), "{d:?}");
        }
    }

    #[test]
    fn elements_are_distinct() {
        let src: Vec<u32> = (0..9).collect();
        let mut seen: Vec<Vec<u32>> = Dihedral::ALL.iter().map(|d| d.apply_raster(&src, 3, 3).0).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 8);
    }
}
