//! English Snowball (Porter 2) stemming algorithm.
//!
//! Suffix rules operate on a char buffer with two region marks. R1 is the
//! region after the first non-vowel that follows a vowel, R2 the same rule
//! applied within R1. A rule list always matches its longest suffix first;
//! if that suffix fails its region or context condition the whole step is a
//! no-op (no fallback to shorter suffixes).

/// Whole-word exceptional forms, applied before anything else.
const EXCEPTIONS: &[(&str, &str)] = &[
    ("skis", "ski"),
    ("skies", "sky"),
    ("dying", "die"),
    ("lying", "lie"),
    ("tying", "tie"),
    ("idly", "idl"),
    ("gently", "gentl"),
    ("ugly", "ugli"),
    ("early", "earli"),
    ("only", "onli"),
    ("singly", "singl"),
    ("sky", "sky"),
    ("news", "news"),
    ("howe", "howe"),
    ("atlas", "atlas"),
    ("cosmos", "cosmos"),
    ("bias", "bias"),
    ("andes", "andes"),
];

/// Words left untouched after step 1a.
const EXCEPTIONS_AFTER_1A: &[&str] = &[
    "inning", "outing", "canning", "herring", "earring", "proceed", "exceed", "succeed",
];

const DOUBLES: &[&str] = &["bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt"];

pub fn stem(word: &str) -> String {
    for (from, to) in EXCEPTIONS {
        if word == *from {
            return (*to).to_string();
        }
    }
    if word.chars().count() < 3 {
        return word.to_string();
    }
    let mut w = Word::new(word);
    w.prelude();
    w.mark_regions();
    w.step_0();
    w.step_1a();
    if !w.is_exception_after_1a() {
        w.step_1b();
        w.step_1c();
        w.step_2();
        w.step_3();
        w.step_4();
        w.step_5();
    }
    w.postlude();
    w.chars.into_iter().collect()
}

struct Word {
    chars: Vec<char>,
    p1: usize,
    p2: usize,
    y_marked: bool,
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

impl Word {
    fn new(word: &str) -> Self {
        let chars: Vec<char> = word.chars().collect();
        let len = chars.len();
        Word {
            chars,
            p1: len,
            p2: len,
            y_marked: false,
        }
    }

    fn len(&self) -> usize {
        self.chars.len()
    }

    fn vowel_at(&self, i: usize) -> bool {
        is_vowel(self.chars[i])
    }

    /// Strip one leading apostrophe and mark consonantal y as 'Y' (word
    /// initial, or following a vowel).
    fn prelude(&mut self) {
        if self.chars.first() == Some(&'\'') {
            self.chars.remove(0);
        }
        for i in 0..self.len() {
            if self.chars[i] == 'y' && (i == 0 || self.vowel_at(i - 1)) {
                self.chars[i] = 'Y';
                self.y_marked = true;
            }
        }
    }

    fn postlude(&mut self) {
        if self.y_marked {
            for c in &mut self.chars {
                if *c == 'Y' {
                    *c = 'y';
                }
            }
        }
    }

    fn mark_regions(&mut self) {
        let len = self.len();
        self.p1 = len;
        self.p2 = len;
        let mut cursor = match self.special_prefix_len() {
            Some(n) => n,
            None => {
                let Some(c) = self.region_boundary(0) else {
                    return;
                };
                c
            }
        };
        self.p1 = cursor;
        cursor = match self.region_boundary(cursor) {
            Some(c) => c,
            None => return,
        };
        self.p2 = cursor;
    }

    /// R1 starts right after these prefixes regardless of vowel structure.
    fn special_prefix_len(&self) -> Option<usize> {
        for prefix in ["gener", "commun", "arsen"] {
            if self.starts_with(prefix) {
                return Some(prefix.chars().count());
            }
        }
        None
    }

    /// Position after the first non-vowel following a vowel, at or after
    /// `from`; None when the pattern runs off the end.
    fn region_boundary(&self, from: usize) -> Option<usize> {
        let mut i = from;
        while i < self.len() && !self.vowel_at(i) {
            i += 1;
        }
        while i < self.len() && self.vowel_at(i) {
            i += 1;
        }
        if i < self.len() {
            Some(i + 1)
        } else {
            None
        }
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| i < self.len() && self.chars[i] == c)
    }

    fn ends_with(&self, s: &str) -> bool {
        let n = s.chars().count();
        if n > self.len() {
            return false;
        }
        let start = self.len() - n;
        s.chars().enumerate().all(|(i, c)| self.chars[start + i] == c)
    }

    /// Longest suffix of `word` present in `suffixes`; the list must be
    /// ordered longest first. Returns (index, suffix start position).
    fn longest_suffix(&self, suffixes: &[&str]) -> Option<(usize, usize)> {
        for (idx, s) in suffixes.iter().enumerate() {
            if self.ends_with(s) {
                return Some((idx, self.len() - s.chars().count()));
            }
        }
        None
    }

    fn truncate_to(&mut self, pos: usize) {
        self.chars.truncate(pos);
    }

    fn replace_from(&mut self, pos: usize, repl: &str) {
        self.chars.truncate(pos);
        self.chars.extend(repl.chars());
    }

    fn in_r1(&self, pos: usize) -> bool {
        pos >= self.p1
    }

    fn in_r2(&self, pos: usize) -> bool {
        pos >= self.p2
    }

    fn has_vowel_before(&self, pos: usize) -> bool {
        (0..pos).any(|i| self.vowel_at(i))
    }

    /// Short-syllable test looking backwards from `pos` (exclusive): either
    /// non-vowel / vowel / non-vowel(not w, x, Y) at positions pos-3..pos,
    /// or vowel / non-vowel starting the word.
    fn short_syllable_before(&self, pos: usize) -> bool {
        if pos >= 3 {
            let c = self.chars[pos - 1];
            if !is_vowel(c)
                && c != 'w'
                && c != 'x'
                && c != 'Y'
                && self.vowel_at(pos - 2)
                && !self.vowel_at(pos - 3)
            {
                return true;
            }
        }
        pos == 2 && !self.vowel_at(pos - 1) && self.vowel_at(pos - 2)
    }

    /// Remove the longest of `'s'`, `'s`, `'`.
    fn step_0(&mut self) {
        if let Some((_, pos)) = self.longest_suffix(&["'s'", "'s", "'"]) {
            self.truncate_to(pos);
        }
    }

    fn step_1a(&mut self) {
        let Some((idx, pos)) = self.longest_suffix(&["sses", "ies", "ied", "ss", "us", "s"]) else {
            return;
        };
        match idx {
            0 => self.replace_from(pos, "ss"),
            1 | 2 => {
                // ies/ied: "i" when more than one letter precedes, else "ie"
                if pos > 1 {
                    self.replace_from(pos, "i");
                } else {
                    self.replace_from(pos, "ie");
                }
            }
            3 | 4 => {} // ss, us: matched, no change
            5 => {
                // bare s: delete when a vowel exists before the preceding char
                if pos >= 2 && self.has_vowel_before(pos - 1) {
                    self.truncate_to(pos);
                }
            }
            _ => unreachable!(),
        }
    }

    fn is_exception_after_1a(&self) -> bool {
        EXCEPTIONS_AFTER_1A.iter().any(|w| {
            w.chars().count() == self.len() && self.ends_with(w)
        })
    }

    fn step_1b(&mut self) {
        let Some((idx, pos)) =
            self.longest_suffix(&["eedly", "ingly", "edly", "eed", "ing", "ed"])
        else {
            return;
        };
        match idx {
            0 | 3 => {
                // eedly, eed
                if self.in_r1(pos) {
                    self.replace_from(pos, "ee");
                }
            }
            _ => {
                if !self.has_vowel_before(pos) {
                    return;
                }
                self.truncate_to(pos);
                if let Some((_, p)) = self.longest_suffix(&["at", "bl", "iz"]) {
                    let _ = p;
                    self.chars.push('e');
                } else if let Some((_, _)) = self.longest_suffix(DOUBLES) {
                    self.chars.pop();
                } else if self.p1 == self.len() && self.short_syllable_before(self.len()) {
                    self.chars.push('e');
                }
            }
        }
    }

    fn step_1c(&mut self) {
        let len = self.len();
        if len < 3 {
            return;
        }
        let last = self.chars[len - 1];
        if (last == 'y' || last == 'Y') && !self.vowel_at(len - 2) {
            self.chars[len - 1] = 'i';
        }
    }

    fn step_2(&mut self) {
        const SUFFIXES: &[&str] = &[
            "ization", "ational", "fulness", "ousness", "iveness", "tional", "biliti", "lessli",
            "entli", "ation", "alism", "aliti", "iviti", "ousli", "fulli", "enci", "anci", "abli",
            "izer", "ator", "alli", "bli", "ogi", "li",
        ];
        let Some((idx, pos)) = self.longest_suffix(SUFFIXES) else {
            return;
        };
        if !self.in_r1(pos) {
            return;
        }
        match SUFFIXES[idx] {
            "tional" => self.replace_from(pos, "tion"),
            "enci" => self.replace_from(pos, "ence"),
            "anci" => self.replace_from(pos, "ance"),
            "abli" => self.replace_from(pos, "able"),
            "entli" => self.replace_from(pos, "ent"),
            "izer" | "ization" => self.replace_from(pos, "ize"),
            "ational" | "ation" | "ator" => self.replace_from(pos, "ate"),
            "alism" | "aliti" | "alli" => self.replace_from(pos, "al"),
            "fulness" | "fulli" => self.replace_from(pos, "ful"),
            "ousli" | "ousness" => self.replace_from(pos, "ous"),
            "iveness" | "iviti" => self.replace_from(pos, "ive"),
            "biliti" | "bli" => self.replace_from(pos, "ble"),
            "ogi" => {
                if pos > 0 && self.chars[pos - 1] == 'l' {
                    self.replace_from(pos, "og");
                }
            }
            "lessli" => self.replace_from(pos, "less"),
            "li" => {
                if pos > 0 && matches!(self.chars[pos - 1],
                    'c' | 'd' | 'e' | 'g' | 'h' | 'k' | 'm' | 'n' | 'r' | 't')
                {
                    self.truncate_to(pos);
                }
            }
            _ => unreachable!(),
        }
    }

    fn step_3(&mut self) {
        const SUFFIXES: &[&str] = &[
            "ational", "tional", "alize", "icate", "iciti", "ative", "ical", "ness", "ful",
        ];
        let Some((idx, pos)) = self.longest_suffix(SUFFIXES) else {
            return;
        };
        if !self.in_r1(pos) {
            return;
        }
        match SUFFIXES[idx] {
            "ational" => self.replace_from(pos, "ate"),
            "tional" => self.replace_from(pos, "tion"),
            "alize" => self.replace_from(pos, "al"),
            "icate" | "iciti" | "ical" => self.replace_from(pos, "ic"),
            "ful" | "ness" => self.truncate_to(pos),
            "ative" => {
                if self.in_r2(pos) {
                    self.truncate_to(pos);
                }
            }
            _ => unreachable!(),
        }
    }

    fn step_4(&mut self) {
        const SUFFIXES: &[&str] = &[
            "ement", "ance", "ence", "able", "ible", "ment", "ate", "ive", "ize", "iti", "ism",
            "ous", "ant", "ent", "ion", "al", "ic", "er",
        ];
        let Some((idx, pos)) = self.longest_suffix(SUFFIXES) else {
            return;
        };
        if !self.in_r2(pos) {
            return;
        }
        if SUFFIXES[idx] == "ion" {
            if pos > 0 && matches!(self.chars[pos - 1], 's' | 't') {
                self.truncate_to(pos);
            }
        } else {
            self.truncate_to(pos);
        }
    }

    fn step_5(&mut self) {
        let len = self.len();
        if len == 0 {
            return;
        }
        match self.chars[len - 1] {
            'e' => {
                let pos = len - 1;
                if self.in_r2(pos) || (self.in_r1(pos) && !self.short_syllable_before(pos)) {
                    self.truncate_to(pos);
                }
            }
            'l' => {
                let pos = len - 1;
                if self.in_r2(pos) && pos > 0 && self.chars[pos - 1] == 'l' {
                    self.truncate_to(pos);
                }
            }
            _ => {}
        }
    }
}
