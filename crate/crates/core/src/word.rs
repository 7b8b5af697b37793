//! Packed words over the letters `1..=8`.

use std::fmt;

/// Maximum supported word length.
pub const MAX_LEN: usize = 21;

/// A noncommutative monomial `r_{k1} ... r_{kn}`, letters packed three bits each with the
/// first letter most significant so that equal-length words compare lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    len: u8,
    bits: u64,
}

impl Word {
    pub const EMPTY: Word = Word { len: 0, bits: 0 };

    pub fn new(letters: &[u8]) -> Word {
        let mut w = Word::EMPTY;
        for &l in letters {
            w = w.push(l);
        }
        w
    }

    /// Packed letters, three bits each (letter minus one), first letter most significant.
    pub fn code(&self) -> u64 {
        self.bits
    }

    pub fn from_code(len: usize, bits: u64) -> Word {
        assert!(len <= MAX_LEN, "word too long");
        Word { len: len as u8, bits: bits & ((1u64 << (3 * len)) - 1) }
    }

    pub fn letter(l: u8) -> Word {
        Word::EMPTY.push(l)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(self, l: u8) -> Word {
        assert!((1..=8).contains(&l), "letter {l} out of range");
        assert!((self.len as usize) < MAX_LEN, "word too long");
        Word { len: self.len + 1, bits: (self.bits << 3) | (l - 1) as u64 }
    }

    pub fn get(&self, i: usize) -> u8 {
        debug_assert!(i < self.len());
        ((self.bits >> (3 * (self.len() - 1 - i))) & 7) as u8 + 1
    }

    pub fn letters(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.letters().collect()
    }

    pub fn concat(&self, o: &Word) -> Word {
        assert!(self.len() + o.len() <= MAX_LEN, "word too long");
        Word { len: self.len + o.len, bits: (self.bits << (3 * o.len())) | o.bits }
    }

    pub fn first(&self) -> Option<u8> {
        (self.len > 0).then(|| self.get(0))
    }

    pub fn last(&self) -> Option<u8> {
        (self.len > 0).then(|| (self.bits & 7) as u8 + 1)
    }

    /// Letters `i..j`.
    pub fn slice(&self, i: usize, j: usize) -> Word {
        let n = j - i;
        let bits = (self.bits >> (3 * (self.len() - j))) & ((1u64 << (3 * n)) - 1);
        Word { len: n as u8, bits }
    }

    pub fn tail(&self) -> Word {
        self.slice(1, self.len())
    }

    pub fn replace(&self, i: usize, l: u8) -> Word {
        let shift = 3 * (self.len() - 1 - i);
        Word { len: self.len, bits: (self.bits & !(7u64 << shift)) | (((l - 1) as u64) << shift) }
    }

    pub fn insert(&self, i: usize, l: u8) -> Word {
        self.slice(0, i).push(l).concat(&self.slice(i, self.len()))
    }

    pub fn remove(&self, i: usize) -> Word {
        self.slice(0, i).concat(&self.slice(i + 1, self.len()))
    }

    pub fn reversed(&self) -> Word {
        let mut w = Word::EMPTY;
        for i in (0..self.len()).rev() {
            w = w.push(self.get(i));
        }
        w
    }

    pub fn map(&self, f: impl Fn(u8) -> u8) -> Word {
        let mut w = Word::EMPTY;
        for l in self.letters() {
            w = w.push(f(l));
        }
        w
    }

    pub fn all(&self, f: impl Fn(u8) -> bool) -> bool {
        self.letters().all(f)
    }

    pub fn count(&self, l: u8) -> usize {
        self.letters().filter(|&x| x == l).count()
    }

    /// All words of length `n` over `alphabet`, in lexicographic order.
    pub fn all_of_length(n: usize, alphabet: &[u8]) -> Vec<Word> {
        let mut out = vec![Word::EMPTY];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * alphabet.len());
            for w in &out {
                for &l in alphabet {
                    next.push(w.push(l));
                }
            }
            out = next;
        }
        out
    }

    /// Parses a digit string; `-` is the empty word.
    pub fn parse(s: &str) -> Option<Word> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Some(Word::EMPTY);
        }
        let mut w = Word::EMPTY;
        for c in s.chars() {
            let d = c.to_digit(10)? as u8;
            if !(1..=8).contains(&d) || w.len() >= MAX_LEN {
                return None;
            }
            w = w.push(d);
        }
        Some(w)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        for l in self.letters() {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing() {
        let w = Word::new(&[3, 1, 8, 2]);
        assert_eq!(w.to_vec(), vec![3, 1, 8, 2]);
        assert_eq!(w.first(), Some(3));
        assert_eq!(w.last(), Some(2));
        assert_eq!(w.slice(1, 3).to_vec(), vec![1, 8]);
        assert_eq!(w.reversed().to_vec(), vec![2, 8, 1, 3]);
        assert_eq!(w.replace(2, 5).to_vec(), vec![3, 1, 5, 2]);
        assert_eq!(w.insert(0, 7).to_vec(), vec![7, 3, 1, 8, 2]);
        assert_eq!(w.insert(4, 7).to_vec(), vec![3, 1, 8, 2, 7]);
        assert_eq!(w.remove(1).to_vec(), vec![3, 8, 2]);
        assert_eq!(Word::new(&[1, 2]).concat(&Word::new(&[3])).to_vec(), vec![1, 2, 3]);
        assert_eq!(Word::parse("-"), Some(Word::EMPTY));
        assert_eq!(Word::parse("129"), None);
        assert_eq!(w.to_string(), "3182");
    }

    #[test]
    fn ordering_is_length_then_lex() {
        let mut ws = vec![Word::new(&[2]), Word::new(&[1, 1]), Word::EMPTY, Word::new(&[1])];
        ws.sort();
        assert_eq!(ws, vec![Word::EMPTY, Word::new(&[1]), Word::new(&[2]), Word::new(&[1, 1])]);
    }
}
