//! NMEA 0183 GGA and RMC sentences.
//!
//! `$<talker><type>,<fields...>*<hh>` where `hh` is the XOR of every byte
//! between `$` and `*`, in hex. Only the `GP` and `GN` talkers are accepted.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NmeaError {
    #[error("not an NMEA sentence: {0}")]
    Framing(&'static str),
    #[error("checksum mismatch: sentence says {stated:02X}, payload XOR is {computed:02X}")]
    BadChecksum { stated: u8, computed: u8 },
    #[error("unsupported sentence `{0}`")]
    UnsupportedSentence(String),
    #[error("field {index}: {reason}")]
    MalformedField { index: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixQuality {
    Invalid,
    Gps,
    Dgps,
    RtkFixed,
    RtkFloat,
    Other(u8),
}

impl FixQuality {
    pub fn from_code(code: u8) -> Self {
        match code {
            0 => FixQuality::Invalid,
            1 => FixQuality::Gps,
            2 => FixQuality::Dgps,
            4 => FixQuality::RtkFixed,
            5 => FixQuality::RtkFloat,
            other => FixQuality::Other(other),
        }
    }

    pub fn code(self) -> u8 {
        match self {
            FixQuality::Invalid => 0,
            FixQuality::Gps => 1,
            FixQuality::Dgps => 2,
            FixQuality::RtkFixed => 4,
            FixQuality::RtkFloat => 5,
            FixQuality::Other(c) => c,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FixQuality::Invalid => "invalid",
            FixQuality::Gps => "gps",
            FixQuality::Dgps => "dgps",
            FixQuality::RtkFixed => "rtk_fixed",
            FixQuality::RtkFloat => "rtk_float",
            FixQuality::Other(_) => "other",
        }
    }
}

/// GGA: position fix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GgaFix {
    /// Seconds since UTC midnight.
    pub utc_time: f64,
    pub latitude: f64,
    pub longitude: f64,
    pub fix_quality: FixQuality,
    pub satellites: u32,
    pub hdop: f64,
    /// Antenna altitude above mean sea level.
    pub altitude_m: f64,
    pub geoid_separation_m: Option<f64>,
}

impl GgaFix {
    /// Formats the fix as a `$GPGGA` sentence: time to 0.01 s, coordinates
    /// to 1e-5 arc-minutes.
    pub fn to_sentence(&self) -> String {
        let cs = (self.utc_time * 100.0).round() as u64;
        let (h, m, s) = (cs / 360_000 % 24, cs / 6000 % 60, cs % 6000);
        let coord = |v: f64, deg_digits: usize| {
            let units = (v.abs() * 60.0 * 1e5).round() as u64;
            let (deg, rem) = (units / 6_000_000, units % 6_000_000);
            format!("{deg:0deg_digits$}{:02}.{:05}", rem / 100_000, rem % 100_000)
        };
        let geoid = self.geoid_separation_m.map(|g| format!("{g:.1}")).unwrap_or_default();
        with_checksum(&format!(
            "GPGGA,{h:02}{m:02}{:02}.{:02},{},{},{},{},{},{:02},{:.1},{:.3},M,{geoid},M,,",
            s / 100,
            s % 100,
            coord(self.latitude, 2),
            if self.latitude < 0.0 { 'S' } else { 'N' },
            coord(self.longitude, 3),
            if self.longitude < 0.0 { 'W' } else { 'E' },
            self.fix_quality.code(),
            self.satellites,
            self.hdop,
            self.altitude_m,
        ))
    }
}

/// RMC: recommended minimum navigation data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmcFix {
    pub utc_time: f64,
    /// `A` (active) vs `V` (void).
    pub active: bool,
    pub latitude: f64,
    pub longitude: f64,
    pub speed_knots: f64,
    pub course_deg: Option<f64>,
    /// `(year, month, day)`.
    pub date: (u16, u8, u8),
    pub magnetic_variation_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NmeaSentence {
    Gga(GgaFix),
    Rmc(RmcFix),
}

impl NmeaSentence {
    pub fn utc_time(&self) -> f64 {
        match self {
            NmeaSentence::Gga(g) => g.utc_time,
            NmeaSentence::Rmc(r) => r.utc_time,
        }
    }

    pub fn position(&self) -> (f64, f64) {
        match self {
            NmeaSentence::Gga(g) => (g.latitude, g.longitude),
            NmeaSentence::Rmc(r) => (r.latitude, r.longitude),
        }
    }
}

/// XOR of all bytes in `payload` (the text between `$` and `*`).
pub fn checksum(payload: &[u8]) -> u8 {
    payload.iter().fold(0, |acc, b| acc ^ b)
}

/// Wraps `payload` as `$payload*hh`.
pub fn with_checksum(payload: &str) -> String {
    format!("${payload}*{:02X}", checksum(payload.as_bytes()))
}

fn hex_digit(b: u8) -> Option<u8> {
    match b {
        b'0'..=b'9' => Some(b - b'0'),
        b'A'..=b'F' => Some(b - b'A' + 10),
        b'a'..=b'f' => Some(b - b'a' + 10),
        _ => None,
    }
}

/// Verifies the checksum, then parses a GGA or RMC sentence.
pub fn parse_nmea(line: &str) -> Result<NmeaSentence, NmeaError> {
    let bytes = line.trim_end_matches(['\r', '\n']).as_bytes();
    if bytes.first() != Some(&b'$') {
        return Err(NmeaError::Framing("missing leading `$`"));
    }
    let star = bytes.iter().rposition(|b| *b == b'*').ok_or(NmeaError::Framing("missing `*` checksum marker"))?;
    let tail = &bytes[star + 1..];
    if tail.len() != 2 {
        return Err(NmeaError::Framing("checksum must be two hex digits"));
    }
    let stated = match (hex_digit(tail[0]), hex_digit(tail[1])) {
        (Some(h), Some(l)) => h << 4 | l,
        _ => return Err(NmeaError::Framing("checksum must be two hex digits")),
    };
    let payload = &bytes[1..star];
    let computed = checksum(payload);
    if stated != computed {
        return Err(NmeaError::BadChecksum { stated, computed });
    }
    let payload = std::str::from_utf8(payload).map_err(|_| NmeaError::Framing("payload is not ASCII"))?;
    let fields: Vec<&str> = payload.split(',').collect();
    let address = fields[0];
    let supported_talker = address.len() == 5 && (address.starts_with("GP") || address.starts_with("GN"));
    match (supported_talker, address.get(2..)) {
        (true, Some("GGA")) => parse_gga(&fields).map(NmeaSentence::Gga),
        (true, Some("RMC")) => parse_rmc(&fields).map(NmeaSentence::Rmc),
        _ => Err(NmeaError::UnsupportedSentence(address.to_string())),
    }
}

fn malformed(index: usize, reason: impl Into<String>) -> NmeaError {
    NmeaError::MalformedField { index, reason: reason.into() }
}

fn field<'a>(fields: &[&'a str], index: usize) -> Result<&'a str, NmeaError> {
    fields.get(index).copied().ok_or_else(|| malformed(index, "missing"))
}

fn required<'a>(fields: &[&'a str], index: usize) -> Result<&'a str, NmeaError> {
    let f = field(fields, index)?;
    if f.is_empty() {
        return Err(malformed(index, "empty"));
    }
    Ok(f)
}

fn number(fields: &[&str], index: usize) -> Result<f64, NmeaError> {
    let f = required(fields, index)?;
    match f.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(malformed(index, format!("`{f}` is not a number"))),
    }
}

fn optional_number(fields: &[&str], index: usize) -> Result<Option<f64>, NmeaError> {
    match fields.get(index) {
        None | Some(&"") => Ok(None),
        Some(_) => number(fields, index).map(Some),
    }
}

/// `hhmmss[.sss]` → seconds of day.
fn utc_time(fields: &[&str], index: usize) -> Result<f64, NmeaError> {
    let f = required(fields, index)?;
    let bad = || malformed(index, format!("`{f}` is not hhmmss[.sss]"));
    if f.len() < 6 || !f.as_bytes()[..6].iter().all(u8::is_ascii_digit) {
        return Err(bad());
    }
    let h: u32 = f[0..2].parse().map_err(|_| bad())?;
    let m: u32 = f[2..4].parse().map_err(|_| bad())?;
    let s: f64 = f[4..].parse().map_err(|_| bad())?;
    if h > 23 || m > 59 || !(0.0..61.0).contains(&s) {
        return Err(bad());
    }
    Ok(f64::from(h * 3600 + m * 60) + s)
}

/// `d…dmm.mmmm` plus hemisphere → signed decimal degrees.
fn coordinate(fields: &[&str], index: usize, deg_digits: usize, positive: char, negative: char) -> Result<f64, NmeaError> {
    let f = required(fields, index)?;
    let bad = |r: &str| malformed(index, format!("`{f}`: {r}"));
    let dot = f.find('.').unwrap_or(f.len());
    if dot != deg_digits + 2 || !f.as_bytes()[..dot].iter().all(u8::is_ascii_digit) {
        return Err(bad("expected ddmm.mmmm / dddmm.mmmm"));
    }
    let degrees: f64 = f[..deg_digits].parse().map_err(|_| bad("bad degrees"))?;
    let minutes: f64 = f[deg_digits..].parse().map_err(|_| bad("bad minutes"))?;
    if minutes >= 60.0 {
        return Err(bad("minutes out of range"));
    }
    let value = degrees + minutes / 60.0;
    let limit = if deg_digits == 2 { 90.0 } else { 180.0 };
    if value > limit {
        return Err(bad("out of range"));
    }
    let hemi = required(fields, index + 1)?;
    match hemi.chars().next() {
        Some(c) if hemi.len() == 1 && c == positive => Ok(value),
        Some(c) if hemi.len() == 1 && c == negative => Ok(-value),
        _ => Err(malformed(index + 1, format!("hemisphere must be {positive} or {negative}"))),
    }
}

fn parse_gga(f: &[&str]) -> Result<GgaFix, NmeaError> {
    let utc_time = utc_time(f, 1)?;
    let latitude = coordinate(f, 2, 2, 'N', 'S')?;
    let longitude = coordinate(f, 4, 3, 'E', 'W')?;
    let quality: u8 = required(f, 6)?.parse().map_err(|_| malformed(6, "fix quality is not a digit"))?;
    let satellites: u32 = required(f, 7)?.parse().map_err(|_| malformed(7, "satellite count is not an integer"))?;
    let altitude_m = number(f, 9)?;
    if field(f, 10)? != "M" {
        return Err(malformed(10, "altitude unit must be M"));
    }
    Ok(GgaFix {
        utc_time,
        latitude,
        longitude,
        fix_quality: FixQuality::from_code(quality),
        satellites,
        hdop: number(f, 8)?,
        altitude_m,
        geoid_separation_m: optional_number(f, 11)?,
    })
}

fn parse_rmc(f: &[&str]) -> Result<RmcFix, NmeaError> {
    let active = match required(f, 2)? {
        "A" => true,
        "V" => false,
        _ => return Err(malformed(2, "status must be A or V")),
    };
    let date = required(f, 9)?;
    if date.len() != 6 || !date.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(9, format!("`{date}` is not ddmmyy")));
    }
    let day: u8 = date[0..2].parse().expect("digits");
    let month: u8 = date[2..4].parse().expect("digits");
    let yy: u16 = date[4..6].parse().expect("digits");
    if !(1..=31).contains(&day) || !(1..=12).contains(&month) {
        return Err(malformed(9, format!("`{date}` is not a valid date")));
    }
    let year = if yy < 80 { 2000 + yy } else { 1900 + yy };
    let variation = match optional_number(f, 10)? {
        None => None,
        Some(v) => match field(f, 11).unwrap_or("") {
            "E" => Some(v),
            "W" => Some(-v),
            _ => return Err(malformed(11, "variation direction must be E or W")),
        },
    };
    Ok(RmcFix {
        utc_time: utc_time(f, 1)?,
        active,
        latitude: coordinate(f, 3, 2, 'N', 'S')?,
        longitude: coordinate(f, 5, 3, 'E', 'W')?,
        speed_knots: number(f, 7)?,
        course_deg: optional_number(f, 8)?,
        date: (year, month, day),
        magnetic_variation_deg: variation,
    })
}
