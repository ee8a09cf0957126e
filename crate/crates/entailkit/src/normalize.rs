//! Text normalization: Chinese numeral → Arabic conversion with idiom
//! protection, and table-driven traditional↔simplified script conversion.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Character-to-value maps for reading Chinese numerals.
///
/// `units` holds both the section units (十 100 千) and the section
/// multipliers (萬 億); anything valued 10⁴ or above starts a new
/// multiplicative section. `singletons` are standalone tens such as 廿 (20)
/// that may still take a ones digit after them.
#[derive(Debug, Clone)]
pub struct NumeralGrammar {
    pub digits: BTreeMap<char, u64>,
    pub units: BTreeMap<char, u64>,
    pub singletons: BTreeMap<char, u64>,
}

const BIG_UNIT_MIN: u64 = 10_000;

impl Default for NumeralGrammar {
    fn default() -> Self {
        let mut digits = BTreeMap::new();
        for (i, c) in "零一二三四五六七八九".chars().enumerate() {
            digits.insert(c, i as u64);
        }
        for (i, c) in "壹貳參肆伍陸柒捌玖".chars().enumerate() {
            digits.insert(c, i as u64 + 1);
        }
        digits.insert('〇', 0);
        digits.insert('兩', 2);
        digits.insert('两', 2);

        let mut units = BTreeMap::new();
        for (c, v) in [
            ('十', 10),
            ('拾', 10),
            ('百', 100),
            ('佰', 100),
            ('千', 1_000),
            ('仟', 1_000),
            ('萬', 10_000),
            ('万', 10_000),
            ('億', 100_000_000),
            ('亿', 100_000_000),
        ] {
            units.insert(c, v);
        }

        let mut singletons = BTreeMap::new();
        singletons.insert('廿', 20);
        singletons.insert('卅', 30);

        NumeralGrammar {
            digits,
            units,
            singletons,
        }
    }
}

impl NumeralGrammar {
    pub fn is_numeral_char(&self, c: char) -> bool {
        self.digits.contains_key(&c)
            || self.units.contains_key(&c)
            || self.singletons.contains_key(&c)
    }
}

/// Literal strings the numeral converter must leave untouched.
#[derive(Debug, Clone)]
pub struct ExceptionList {
    idioms: Vec<Vec<char>>,
}

impl Default for ExceptionList {
    fn default() -> Self {
        ExceptionList::from_idioms(["朝九晚五", "舉一反三", "三心二意", "一石二鳥"])
    }
}

impl ExceptionList {
    pub fn empty() -> Self {
        ExceptionList { idioms: Vec::new() }
    }

    pub fn from_idioms<I, S>(idioms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut idioms: Vec<Vec<char>> = idioms
            .into_iter()
            .map(|s| s.as_ref().chars().collect())
            .filter(|v: &Vec<char>| !v.is_empty())
            .collect();
        // longest-match-first during scanning
        idioms.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        idioms.dedup();
        ExceptionList { idioms }
    }

    /// One idiom per line, `#` comments.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(ExceptionList::from_idioms(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        ))
    }

    fn longest_match_at(&self, chars: &[char], i: usize) -> Option<usize> {
        self.idioms
            .iter()
            .find(|idiom| chars[i..].starts_with(idiom))
            .map(|idiom| idiom.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NumTok {
    Digit(u64),
    SmallUnit(u64),
    BigUnit(u64),
}

/// Tokenizes numeral characters, recording how many characters each token
/// prefix consumes. Standalone tens (廿, 卅) expand to two tokens sharing one
/// character, so both entries carry the same consumed count.
fn lex_numeral(chars: &[char], g: &NumeralGrammar) -> Option<(Vec<NumTok>, Vec<usize>)> {
    let mut toks = Vec::new();
    let mut consumed = Vec::new();
    for (offset, &c) in chars.iter().enumerate() {
        if let Some(&d) = g.digits.get(&c) {
            toks.push(NumTok::Digit(d));
            consumed.push(offset + 1);
        } else if let Some(&u) = g.units.get(&c) {
            toks.push(if u >= BIG_UNIT_MIN {
                NumTok::BigUnit(u)
            } else {
                NumTok::SmallUnit(u)
            });
            consumed.push(offset + 1);
        } else if let Some(&v) = g.singletons.get(&c) {
            toks.push(NumTok::Digit(v / 10));
            consumed.push(offset + 1);
            toks.push(NumTok::SmallUnit(10));
            consumed.push(offset + 1);
        } else {
            return None;
        }
    }
    Some((toks, consumed))
}

/// Reads one Chinese numeral as a non-negative integer.
///
/// Accepts standard positional forms (三十二, 一百零三), the leading-unit
/// shorthand (十二), standalone tens (廿, 卅, optionally followed by a ones
/// digit), and financial digit variants. Values above 2⁶³−1 are an error.
pub fn parse_chinese_numeral(s: &str, g: &NumeralGrammar) -> Result<u64> {
    let chars: Vec<char> = s.chars().collect();
    let Some((toks, _)) = lex_numeral(&chars, g) else {
        return Err(Error::NotANumeral(s.to_string()));
    };
    if toks.is_empty() {
        return Err(Error::NotANumeral(s.to_string()));
    }
    let value = parse_toks(&toks, s)?;
    if value > i64::MAX as u64 {
        return Err(Error::NumeralOverflow(s.to_string()));
    }
    Ok(value)
}

/// Multiplicative sectioning: split at the rightmost occurrence of the
/// largest section multiplier, so stacked units (萬億) compose by product.
fn parse_toks(toks: &[NumTok], src: &str) -> Result<u64> {
    let split = toks
        .iter()
        .enumerate()
        .filter_map(|(i, t)| match t {
            NumTok::BigUnit(u) => Some((*u, i)),
            _ => None,
        })
        .max_by_key(|&(u, i)| (u, i));

    match split {
        Some((unit, pos)) => {
            let left = &toks[..pos];
            let right = &toks[pos + 1..];
            let left_value = if left.is_empty() { 1 } else { parse_toks(left, src)? };
            let right_value = if right.is_empty() { 0 } else { parse_toks(right, src)? };
            left_value
                .checked_mul(unit)
                .and_then(|v| v.checked_add(right_value))
                .ok_or_else(|| Error::NumeralOverflow(src.to_string()))
        }
        None => parse_section(toks, src),
    }
}

/// A section below 10⁴: digits bound to strictly decreasing small units,
/// 零 as a gap marker, a bare trailing digit as the ones place.
fn parse_section(toks: &[NumTok], src: &str) -> Result<u64> {
    let mut section: u64 = 0;
    let mut pending: u64 = 0;
    let mut last_unit = u64::MAX;
    for tok in toks {
        match *tok {
            NumTok::Digit(d) => {
                if pending != 0 {
                    return Err(Error::NotANumeral(src.to_string()));
                }
                pending = d;
            }
            NumTok::SmallUnit(u) => {
                if u >= last_unit {
                    return Err(Error::NotANumeral(src.to_string()));
                }
                let coeff = if pending == 0 { 1 } else { pending };
                section += coeff * u;
                pending = 0;
                last_unit = u;
            }
            NumTok::BigUnit(_) => unreachable!("sections never contain big units"),
        }
    }
    Ok(section + pending)
}

/// No numeral within the supported integer range needs more characters;
/// bounding the prefix search keeps long runs linear-ish.
const MAX_NUMERAL_CHARS: usize = 64;

/// Replaces every maximal numeral substring outside the exception idioms
/// with its Arabic digits. Within a run of numeral characters the longest
/// parseable prefix is converted first, then scanning resumes, so
/// digit-by-digit sequences such as years come out digit by digit.
pub fn normalize_numerals(text: &str, g: &NumeralGrammar, ex: &ExceptionList) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if let Some(len) = ex.longest_match_at(&chars, i) {
            out.extend(&chars[i..i + len]);
            i += len;
            continue;
        }
        if !g.is_numeral_char(chars[i]) {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        let mut run_end = i;
        while run_end < chars.len() && g.is_numeral_char(chars[run_end]) {
            run_end += 1;
        }
        let window_end = run_end.min(i + MAX_NUMERAL_CHARS);
        let (toks, consumed) =
            lex_numeral(&chars[i..window_end], g).expect("window holds numeral chars only");
        let first_big = toks
            .iter()
            .position(|t| matches!(t, NumTok::BigUnit(_)))
            .unwrap_or(usize::MAX);
        let mut converted = false;
        for t in (1..=toks.len()).rev() {
            // a prefix boundary inside an expanded standalone-tens character
            // would split it; such boundaries share the consumed count
            if t < toks.len() && consumed[t - 1] == consumed[t] {
                continue;
            }
            // section-only prefixes skip the multiplier scan and fail fast
            let parsed = if t <= first_big {
                parse_section(&toks[..t], "")
            } else {
                parse_toks(&toks[..t], "")
            };
            let value = match parsed {
                Ok(v) if v <= i64::MAX as u64 => v,
                _ => continue,
            };
            out.push_str(&value.to_string());
            i += consumed[t - 1];
            converted = true;
            break;
        }
        if !converted {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

/// Word-first conversion table between scripts.
#[derive(Debug, Clone, Default)]
pub struct ScriptTable {
    word_map: Vec<(Vec<char>, String)>,
    char_map: HashMap<char, char>,
}

impl ScriptTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.word_map.is_empty() && self.char_map.is_empty()
    }

    pub fn add_word(&mut self, source: &str, target: &str) {
        let key: Vec<char> = source.chars().collect();
        match key.len() {
            0 => {}
            1 => {
                if let Some(t) = target.chars().next() {
                    self.char_map.insert(key[0], t);
                }
            }
            _ => {
                self.word_map.retain(|(k, _)| *k != key);
                self.word_map.push((key, target.to_string()));
                self.word_map
                    .sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
            }
        }
    }

    /// Loads lines `source ⟨tab⟩ target`; single-character sources populate
    /// the character map, longer ones the word map.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut table = ScriptTable::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (source, target) = line.split_once('\t').ok_or_else(|| {
                Error::format(path, lineno + 1, "expected `source ⟨tab⟩ target`")
            })?;
            table.add_word(source.trim(), target.trim());
        }
        Ok(table)
    }
}

/// Longest-match word conversion with per-character fallback; characters
/// covered by neither map pass through unchanged.
pub fn convert_script(text: &str, table: &ScriptTable) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if let Some((key, target)) = table
            .word_map
            .iter()
            .find(|(key, _)| chars[i..].starts_with(key))
        {
            out.push_str(target);
            i += key.len();
            continue;
        }
        out.push(table.char_map.get(&chars[i]).copied().unwrap_or(chars[i]));
        i += 1;
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &str) -> u64 {
        parse_chinese_numeral(s, &NumeralGrammar::default()).unwrap()
    }

    #[test]
    fn default_grammar_units_strictly_increase() {
        let g = NumeralGrammar::default();
        let values: Vec<u64> = "十百千萬億".chars().map(|c| g.units[&c]).collect();
        assert!(values.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn reads_cited_forms() {
        assert_eq!(parse("三十二"), 32);
        assert_eq!(parse("十二"), 12);
        assert_eq!(parse("一十二"), 12);
        assert_eq!(parse("廿"), 20);
        assert_eq!(parse("卅"), 30);
        assert_eq!(parse("參"), 3);
        assert_eq!(parse("一百零三"), 103);
    }

    #[test]
    fn reads_section_multipliers() {
        assert_eq!(parse("一萬"), 10_000);
        assert_eq!(parse("萬"), 10_000);
        assert_eq!(parse("三億五千萬"), 350_000_000);
        assert_eq!(parse("一百零三萬"), 1_030_000);
        assert_eq!(parse("三萬億"), 3_000_000_000_000);
        assert_eq!(parse("十萬零三"), 100_003);
        assert_eq!(parse("零"), 0);
        assert_eq!(parse("廿一"), 21);
        assert_eq!(parse("卅五"), 35);
    }

    #[test]
    fn rejects_non_numerals() {
        let g = NumeralGrammar::default();
        assert!(matches!(
            parse_chinese_numeral("貓", &g),
            Err(Error::NotANumeral(_))
        ));
        assert!(matches!(
            parse_chinese_numeral("", &g),
            Err(Error::NotANumeral(_))
        ));
        assert!(matches!(
            parse_chinese_numeral("二三", &g),
            Err(Error::NotANumeral(_))
        ));
        assert!(matches!(
            parse_chinese_numeral("十十", &g),
            Err(Error::NotANumeral(_))
        ));
    }

    #[test]
    fn overflow_is_an_error() {
        let g = NumeralGrammar::default();
        let s = "九".to_string() + &"億".repeat(8);
        assert!(matches!(
            parse_chinese_numeral(&s, &g),
            Err(Error::NumeralOverflow(_))
        ));
    }

    #[test]
    fn generator_oracle_agreement_below_ten_thousand() {
        let g = NumeralGrammar::default();
        for value in 0..=9_999u64 {
            for form in oracle::surface_forms(value) {
                assert_eq!(
                    parse_chinese_numeral(&form, &g).unwrap(),
                    value,
                    "surface `{form}`"
                );
            }
        }
    }

    #[test]
    fn replaces_numerals_in_text() {
        let g = NumeralGrammar::default();
        let ex = ExceptionList::default();
        assert_eq!(normalize_numerals("三十二人", &g, &ex), "32人");
        assert_eq!(normalize_numerals("", &g, &ex), "");
        assert_eq!(normalize_numerals("他有三隻貓和十二隻狗", &g, &ex), "他有3隻貓和12隻狗");
    }

    #[test]
    fn idioms_pass_through() {
        let g = NumeralGrammar::default();
        let ex = ExceptionList::default();
        assert_eq!(normalize_numerals("朝九晚五", &g, &ex), "朝九晚五");
        assert_eq!(normalize_numerals("舉一反三", &g, &ex), "舉一反三");
        assert_eq!(normalize_numerals("三心二意", &g, &ex), "三心二意");
        // same characters convert once the idiom list is empty
        assert_eq!(
            normalize_numerals("朝九晚五", &g, &ExceptionList::empty()),
            "朝9晚5"
        );
    }

    #[test]
    fn digit_sequences_convert_digit_by_digit() {
        let g = NumeralGrammar::default();
        let ex = ExceptionList::default();
        assert_eq!(normalize_numerals("一九九八年", &g, &ex), "1998年");
    }

    #[test]
    fn long_numeral_runs_stay_fast() {
        let g = NumeralGrammar::default();
        let ex = ExceptionList::default();
        let text = "九".repeat(2_000);
        let start = std::time::Instant::now();
        let out = normalize_numerals(&text, &g, &ex);
        assert!(start.elapsed().as_secs_f64() < 2.0, "took {:?}", start.elapsed());
        assert_eq!(out, "9".repeat(2_000));
    }

    #[test]
    fn empty_script_table_is_identity() {
        let table = ScriptTable::new();
        assert_eq!(convert_script("電腦軟體的品質", &table), "電腦軟體的品質");
        assert_eq!(convert_script("", &table), "");
    }

    #[test]
    fn word_map_wins_over_char_map() {
        let mut table = ScriptTable::new();
        table.add_word("電腦", "计算机");
        table.add_word("軟體", "软件");
        table.add_word("電", "电");
        assert_eq!(convert_script("電腦軟體", &table), "计算机软件");
        // outside the word, the char map applies
        assert_eq!(convert_script("電力", &table), "电力");
    }

    #[test]
    fn char_only_table_converts_per_character() {
        let mut table = ScriptTable::new();
        for (s, t) in [('業', '业'), ('術', '术'), ('準', '准')] {
            table.add_word(&s.to_string(), &t.to_string());
        }
        assert_eq!(convert_script("工業技術水準", &table), "工业技术水准");
    }

    proptest! {
        #[test]
        fn normalize_numerals_is_idempotent(text in "[\\PC]{0,24}") {
            let g = NumeralGrammar::default();
            let ex = ExceptionList::default();
            let once = normalize_numerals(&text, &g, &ex);
            let twice = normalize_numerals(&once, &g, &ex);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn numeral_rich_text_is_idempotent(
            parts in proptest::collection::vec(
                proptest::sample::select(vec![
                    "三十二", "十二", "廿", "朝九晚五", "貓", "一九九八", "零", "一百零三萬", "x",
                ]),
                0..8,
            )
        ) {
            let text: String = parts.concat();
            let g = NumeralGrammar::default();
            let ex = ExceptionList::default();
            let once = normalize_numerals(&text, &g, &ex);
            prop_assert_eq!(normalize_numerals(&once, &g, &ex), once.clone());
        }

        #[test]
        fn non_numeral_chars_survive(text in "[a-z貓狗走路，。]{0,20}") {
            let g = NumeralGrammar::default();
            let ex = ExceptionList::default();
            prop_assert_eq!(normalize_numerals(&text, &g, &ex), text);
        }

        // alphabet excludes idiom characters and ASCII digits, so every
        // numeral run is replaced and everything else is copied verbatim
        #[test]
        fn chars_outside_replaced_spans_survive(text in "[一三十百人貓x。]{0,20}") {
            let g = NumeralGrammar::default();
            let ex = ExceptionList::default();
            let out = normalize_numerals(&text, &g, &ex);
            let kept_in: String = text.chars().filter(|c| !g.is_numeral_char(*c)).collect();
            let kept_out: String = out.chars().filter(|c| !c.is_ascii_digit()).collect();
            prop_assert_eq!(kept_in, kept_out);
        }

        #[test]
        fn empty_table_identity_property(text in "[\\PC]{0,24}") {
            prop_assert_eq!(convert_script(&text, &ScriptTable::new()), text);
        }
    }
}
