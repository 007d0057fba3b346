#include "netprof/der.hpp"

#include <cctype>

#include "netprof/util.hpp"

namespace netprof {
namespace der {

bool Reader::next(Tlv& out) {
  if (pos_ + 2 > size_) return false;
  size_t start = pos_;
  out.tag = data_[pos_++];
  size_t len = 0;
  uint8_t l0 = data_[pos_++];
  if (l0 < 0x80) {
    len = l0;
  } else {
    size_t n = l0 & 0x7f;
    if (n == 0 || n > 4 || pos_ + n > size_) return false;
    for (size_t i = 0; i < n; ++i) len = (len << 8) | data_[pos_++];
  }
  if (pos_ + len > size_) return false;
  out.value.assign(data_ + pos_, data_ + pos_ + len);
  pos_ += len;
  out.raw.assign(data_ + start, data_ + pos_);
  return true;
}

std::optional<uint8_t> Reader::peek_tag() const {
  if (pos_ >= size_) return std::nullopt;
  return data_[pos_];
}

std::vector<uint8_t> encode(uint8_t tag, const std::vector<uint8_t>& content) {
  std::vector<uint8_t> out;
  out.push_back(tag);
  size_t len = content.size();
  if (len < 0x80) {
    out.push_back(static_cast<uint8_t>(len));
  } else {
    std::vector<uint8_t> lenbytes;
    while (len) {
      lenbytes.insert(lenbytes.begin(), static_cast<uint8_t>(len & 0xff));
      len >>= 8;
    }
    out.push_back(static_cast<uint8_t>(0x80 | lenbytes.size()));
    out.insert(out.end(), lenbytes.begin(), lenbytes.end());
  }
  out.insert(out.end(), content.begin(), content.end());
  return out;
}

static std::vector<uint8_t> concat(const std::vector<std::vector<uint8_t>>& parts) {
  std::vector<uint8_t> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<uint8_t> sequence(const std::vector<std::vector<uint8_t>>& parts) {
  return encode(kSequence, concat(parts));
}

std::vector<uint8_t> set(const std::vector<std::vector<uint8_t>>& parts) {
  return encode(kSet, concat(parts));
}

std::vector<uint8_t> integer(int64_t v) {
  // non-negative values only; that is all the fixtures need
  std::vector<uint8_t> bytes;
  uint64_t u = static_cast<uint64_t>(v < 0 ? 0 : v);
  do {
    bytes.insert(bytes.begin(), static_cast<uint8_t>(u & 0xff));
    u >>= 8;
  } while (u);
  if (bytes[0] & 0x80) bytes.insert(bytes.begin(), 0);
  return encode(kInteger, bytes);
}

std::vector<uint8_t> printable_string(const std::string& s) {
  return encode(kPrintableString, std::vector<uint8_t>(s.begin(), s.end()));
}

std::vector<uint8_t> utc_time(const std::string& s) {
  return encode(kUtcTime, std::vector<uint8_t>(s.begin(), s.end()));
}

std::vector<uint8_t> oid(const std::vector<uint32_t>& arcs) {
  std::vector<uint8_t> out;
  out.push_back(static_cast<uint8_t>(arcs[0] * 40 + arcs[1]));
  for (size_t i = 2; i < arcs.size(); ++i) {
    uint32_t v = arcs[i];
    std::vector<uint8_t> tmp;
    tmp.push_back(static_cast<uint8_t>(v & 0x7f));
    v >>= 7;
    while (v) {
      tmp.insert(tmp.begin(), static_cast<uint8_t>(0x80 | (v & 0x7f)));
      v >>= 7;
    }
    out.insert(out.end(), tmp.begin(), tmp.end());
  }
  return encode(kOid, out);
}

std::vector<uint8_t> context(uint8_t n, const std::vector<uint8_t>& inner) {
  return encode(static_cast<uint8_t>(0xa0 | n), inner);
}

}  // namespace der

namespace {

bool digits(const std::vector<uint8_t>& v, size_t pos, size_t n, int& out) {
  out = 0;
  for (size_t i = 0; i < n; ++i) {
    if (pos + i >= v.size() || !std::isdigit(v[pos + i])) return false;
    out = out * 10 + (v[pos + i] - '0');
  }
  return true;
}

// UTCTime YYMMDDHHMMSSZ or GeneralizedTime YYYYMMDDHHMMSSZ
bool parse_time(const der::Tlv& t, int64_t& out_us) {
  int year, mon, day, hour, min, sec;
  size_t p = 0;
  if (t.tag == der::kUtcTime) {
    int yy;
    if (!digits(t.value, 0, 2, yy)) return false;
    year = yy < 50 ? 2000 + yy : 1900 + yy;
    p = 2;
  } else if (t.tag == der::kGeneralizedTime) {
    if (!digits(t.value, 0, 4, year)) return false;
    p = 4;
  } else {
    return false;
  }
  if (!digits(t.value, p, 2, mon) || !digits(t.value, p + 2, 2, day) ||
      !digits(t.value, p + 4, 2, hour) || !digits(t.value, p + 6, 2, min) ||
      !digits(t.value, p + 8, 2, sec))
    return false;
  out_us = civil_to_epoch_us(year, mon, day, hour, min, sec);
  return true;
}

}  // namespace

std::optional<CertInfo> parse_certificate(const std::vector<uint8_t>& cert_der) {
  der::Reader top(cert_der);
  der::Tlv cert;
  if (!top.next(cert) || cert.tag != der::kSequence) return std::nullopt;

  der::Reader certr(cert.value);
  der::Tlv tbs;
  if (!certr.next(tbs) || tbs.tag != der::kSequence) return std::nullopt;

  der::Reader t(tbs.value);
  der::Tlv f;
  // optional [0] version
  if (auto tag = t.peek_tag(); tag && *tag == der::kContext0) {
    if (!t.next(f)) return std::nullopt;
  }
  if (!t.next(f) || f.tag != der::kInteger) return std::nullopt;   // serial
  if (!t.next(f) || f.tag != der::kSequence) return std::nullopt;  // signature alg

  CertInfo info;
  if (!t.next(f) || f.tag != der::kSequence) return std::nullopt;  // issuer
  info.issuer_der = f.raw;

  if (!t.next(f) || f.tag != der::kSequence) return std::nullopt;  // validity
  {
    der::Reader v(f.value);
    der::Tlv nb, na;
    if (v.next(nb) && v.next(na) && parse_time(nb, info.not_before_us) &&
        parse_time(na, info.not_after_us))
      info.times_valid = true;
  }

  if (!t.next(f) || f.tag != der::kSequence) return std::nullopt;  // subject
  info.subject_der = f.raw;

  return info;
}

std::vector<uint8_t> build_test_certificate(const std::string& issuer_cn,
                                            const std::string& subject_cn,
                                            int64_t not_before_us, int64_t not_after_us) {
  using namespace der;
  auto cn_oid = oid({2, 5, 4, 3});
  auto name = [&](const std::string& cn) {
    return sequence({set({sequence({cn_oid, printable_string(cn)})})});
  };
  auto fmt_utc = [](int64_t us) {
    // invert civil_to_epoch_us for the small range synth uses
    int64_t secs = us / 1000000;
    int64_t days = secs / 86400;
    int64_t rem = secs % 86400;
    // civil-from-days
    days += 719468;
    const int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t y = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    int64_t year = y + (m <= 2);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d%02u%02u%02u%02u%02uZ", static_cast<int>(year % 100), m,
                  d, static_cast<unsigned>(rem / 3600), static_cast<unsigned>(rem % 3600 / 60),
                  static_cast<unsigned>(rem % 60));
    return std::string(buf);
  };
  auto tbs = sequence({
      context(0, integer(2)),
      integer(1),
      sequence({oid({1, 2, 840, 113549, 1, 1, 11})}),  // sha256WithRSAEncryption
      name(issuer_cn),
      sequence({utc_time(fmt_utc(not_before_us)), utc_time(fmt_utc(not_after_us))}),
      name(subject_cn),
      sequence({sequence({oid({1, 2, 840, 113549, 1, 1, 1})}),
                encode(0x03, {0x00, 0x30, 0x03, 0x02, 0x01, 0x01})}),  // stub key
  });
  auto sig_alg = sequence({oid({1, 2, 840, 113549, 1, 1, 11})});
  auto sig = encode(0x03, {0x00, 0x01});
  return sequence({tbs, sig_alg, sig});
}

}  // namespace netprof
