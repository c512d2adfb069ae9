//! Regenerates the bundled corpus under `assets/`.
//!
//! Emits three files: `train.ar.txt` (training corpus), `eval.ar.txt`
//! (held-out slice, same distribution) and `eval_diacritized.ar.txt`
//! (held-out slice with heavy vowel marking). Sentences are sampled from an
//! embedded Modern Standard Arabic lexicon with concatenative affixation and
//! realistic orthographic variation: per-occurrence Alif variant spelling,
//! sporadic harakat, Tatweel stretching, Arabic-Indic/Western digit mixing
//! and Arabic punctuation. A fixed seed makes the output reproducible:
//!
//! ```text
//! cargo run --release --example gen_corpus
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

/// splitmix64; good enough statistics and stable forever.
struct Rng(u64);

impl Rng {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    fn f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    fn pick<'a>(&mut self, items: &'a [&'a str]) -> &'a str {
        items[self.below(items.len())]
    }

    fn chance(&mut self, p: f64) -> bool {
        self.f64() < p
    }
}

const FUNCTION_WORDS: &[&str] = &[
    "في", "من", "على", "إلى", "عن", "مع", "هذا", "هذه", "ذلك", "التي", "الذي", "كان", "كانت",
    "يكون", "لم", "لن", "لا", "ما", "هل", "قد", "كل", "بعض", "غير", "بين", "حتى", "إذا", "لكن",
    "ثم", "أو", "أن", "إن", "أيضا", "كما", "عند", "بعد", "قبل", "منذ", "حيث", "حول", "دون",
    "خلال", "لدى", "نحو", "أمام", "تحت", "فوق", "ضد", "عبر", "أي", "إذ",
];

const STEMS: &[&str] = &[
    "كتاب", "كاتب", "مكتب", "مكتبة", "مكتوب", "كتابة", "درس", "مدرسة", "مدرس", "دروس", "دارس",
    "علم", "معلم", "عالم", "علوم", "تعليم", "قلم", "بيت", "بيوت", "شمس", "قمر", "نجم", "نجوم",
    "سماء", "أرض", "ماء", "نهر", "بحر", "بحار", "جبل", "جبال", "مدينة", "مدن", "قرية", "قرى",
    "طريق", "طرق", "سيارة", "طائرة", "قطار", "حافلة", "حاسوب", "هاتف", "شبكة", "برنامج",
    "برامج", "لغة", "لغات", "كلمة", "كلمات", "جملة", "جمل", "نص", "نصوص", "صفحة", "موقع",
    "مواقع", "خبر", "أخبار", "صحيفة", "صحف", "حكومة", "دولة", "دول", "شعب", "شعوب", "رئيس",
    "وزير", "وزارة", "مجلس", "قانون", "قوانين", "حرية", "عدالة", "سلام", "حرب", "جيش", "شرطة",
    "طبيب", "أطباء", "مستشفى", "دواء", "أدوية", "مرض", "أمراض", "صحة", "طعام", "خبز", "لحم",
    "سمك", "فاكهة", "خضار", "شجرة", "أشجار", "زهرة", "زهور", "حديقة", "حدائق", "مطر", "ثلج",
    "رياح", "طقس", "مناخ", "صيف", "شتاء", "ربيع", "خريف", "يوم", "أيام", "ليلة", "ليالي",
    "صباح", "مساء", "ساعة", "ساعات", "دقيقة", "سنة", "سنوات", "شهر", "شهور", "أسبوع",
    "أسابيع", "تاريخ", "مستقبل", "ماضي", "حاضر", "وقت", "زمن", "عمل", "أعمال", "عامل", "عمال",
    "شركة", "شركات", "سوق", "أسواق", "مال", "أموال", "بنك", "تجارة", "صناعة", "زراعة",
    "اقتصاد", "سياسة", "ثقافة", "فن", "فنون", "موسيقى", "غناء", "رسم", "صورة", "صور", "فيلم",
    "أفلام", "مسرح", "رياضة", "كرة", "قدم", "سباحة", "جري", "لعب", "لاعب", "فريق", "فرق",
    "هدف", "أهداف", "فوز", "خسارة", "تعادل", "مباراة", "نتيجة", "جامعة", "جامعات", "طالب",
    "طلاب", "أستاذ", "امتحان", "نجاح", "شهادة", "بحث", "أبحاث", "مشروع", "مشاريع", "فكرة",
    "أفكار", "رأي", "آراء", "سؤال", "أسئلة", "جواب", "إجابة", "مشكلة", "مشاكل", "حل", "حلول",
    "سبب", "أسباب", "نتائج", "وسيلة", "أداة", "أدوات", "آلة", "آلات", "إنسان", "ناس", "رجل",
    "رجال", "امرأة", "نساء", "طفل", "أطفال", "ولد", "أولاد", "بنت", "بنات", "أب", "أم", "أخ",
    "أخت", "عائلة", "أسرة", "صديق", "أصدقاء", "جار", "حب", "قلب", "قلوب", "عقل", "عيون",
    "وجه", "وجوه", "رأس", "لسان", "صوت", "أصوات", "اسم", "أسماء", "حياة", "موت", "روح",
    "جسم", "نفس", "أمل", "خوف", "فرح", "حزن", "غضب", "ضحك", "بكاء", "نوم", "أكل", "شرب",
    "مشي", "جلوس", "وقوف", "كلام", "صمت", "قراءة", "سفر", "رحلة", "رحلات", "زيارة", "لقاء",
    "اجتماع", "حفلة", "عيد", "أعياد", "هدية", "هدايا", "يكتب", "قرأ", "يقرأ", "ذهب", "يذهب",
    "قال", "يقول", "فعل", "يفعل", "أخذ", "يأخذ", "يأكل", "يشرب", "سمع", "يسمع", "رأى", "يرى",
    "عرف", "يعرف", "فهم", "يفهم", "وجد", "يجد", "طلب", "يطلب", "ساعد", "يساعد", "بدأ", "يبدأ",
    "انتهى", "ينتهي", "استخدم", "يستخدم", "إسلام", "أمر", "أوامر", "إدارة", "أمن", "أهل",
    "أول", "آخر", "أفضل", "أكبر", "أصغر", "أهم", "إعلان", "إنتاج", "أداء", "إمكان", "أثر",
    "آثار", "أصل", "أصول", "إطار", "أزمة", "أرقام", "إصلاح", "أسلوب", "أغنية", "أمثلة",
    "مفتاح", "مفاتيح", "باب", "أبواب", "نافذة", "نوافذ", "جدار", "جدران", "سقف", "غرفة",
    "غرف", "مطبخ", "حمام", "سرير", "كرسي", "كراسي", "طاولة", "مصباح", "مرآة", "ساحة",
    "شارع", "شوارع", "جسر", "جسور", "ميناء", "موانئ", "مطار", "مطارات", "محطة", "محطات",
    "فندق", "فنادق", "مطعم", "مطاعم", "مقهى", "متحف", "متاحف", "قصر", "قصور", "برج",
    "أبراج", "مسجد", "مساجد", "كنيسة", "قلعة", "قلاع", "سور", "خريطة", "خرائط", "بوصلة",
    "رسالة", "رسائل", "بريد", "طابع", "طوابع", "ورقة", "أوراق", "دفتر", "دفاتر", "قاموس",
    "قواميس", "معجم", "رواية", "روايات", "قصة", "قصص", "شعر", "شاعر", "شعراء", "قصيدة",
    "قصائد", "مقال", "مقالات", "خطبة", "خطب", "محاضرة", "محاضرات", "ندوة", "ندوات",
    "مؤتمر", "مؤتمرات", "ورشة", "ورش", "دورة", "دورات", "تدريب", "تمرين", "تمارين",
    "واجب", "واجبات", "اختبار", "اختبارات", "درجة", "درجات", "معدل", "معدلات", "تقرير",
    "تقارير", "ملف", "ملفات", "جهاز", "أجهزة", "شاشة", "شاشات", "لوحة", "لوحات", "فأرة",
    "سماعة", "سماعات", "كاميرا", "بطارية", "بطاريات", "شاحن", "سلك", "أسلاك", "ضوء",
    "أضواء", "ظل", "ظلال", "لون", "ألوان", "أحمر", "أخضر", "أزرق", "أصفر", "أبيض",
    "أسود", "كبير", "صغير", "طويل", "قصير", "واسع", "ضيق", "جميل", "قبيح", "جديد",
    "قديم", "سريع", "بطيء", "قوي", "ضعيف", "غني", "فقير", "سعيد", "حزين", "صعب", "سهل",
];

const SUFFIXES: &[&str] = &[
    "ة", "ات", "ان", "ون", "ين", "ها", "هم", "هن", "كم", "نا", "ك", "ه", "ي", "تها", "تهم",
    "وا", "ته", "تي", "هما", "كما",
];

/// Second-position suffixes: possessives that chain after plural endings.
const CHAIN_SUFFIXES: &[&str] = &["ها", "هم", "نا", "كم", "ه", "ي", "هن"];

const LATIN_WORDS: &[&str] = &["internet", "web", "email", "video", "radio", "km", "USB"];

const HARAKAT: &[char] = &[
    '\u{064E}', '\u{064F}', '\u{0650}', '\u{0652}', '\u{0651}', '\u{064E}', '\u{0650}',
];

const TANWEEN: &[char] = &['\u{064B}', '\u{064C}', '\u{064D}'];

/// Re-spell Alif variants the way real text does: the same underlying word
/// shows up with Hamza written, dropped, or swapped between forms.
fn vary_alif(word: &str, rng: &mut Rng) -> String {
    let mut out = String::with_capacity(word.len());
    for c in word.chars() {
        let replacement = match c {
            'أ' => {
                let roll = rng.f64();
                if roll < 0.45 {
                    'أ'
                } else if roll < 0.82 {
                    'ا'
                } else if roll < 0.92 {
                    'إ'
                } else if roll < 0.98 {
                    'آ'
                } else {
                    'ٱ'
                }
            }
            'إ' => {
                let roll = rng.f64();
                if roll < 0.60 {
                    'إ'
                } else if roll < 0.90 {
                    'ا'
                } else {
                    'أ'
                }
            }
            'آ' => {
                let roll = rng.f64();
                if roll < 0.70 {
                    'آ'
                } else if roll < 0.92 {
                    'ا'
                } else {
                    'أ'
                }
            }
            other => other,
        };
        out.push(replacement);
    }
    out
}

/// Sprinkle vowel marks after letters; `density` is the per-letter chance.
fn diacritize(word: &str, rng: &mut Rng, density: f64) -> String {
    let chars: Vec<char> = word.chars().collect();
    let mut out = String::with_capacity(word.len() * 2);
    for (i, &c) in chars.iter().enumerate() {
        out.push(c);
        let is_letter = ('\u{0621}'..='\u{064A}').contains(&c);
        if is_letter && rng.chance(density) {
            if i + 1 == chars.len() && rng.chance(0.3) {
                out.push(TANWEEN[rng.below(TANWEEN.len())]);
            } else {
                out.push(HARAKAT[rng.below(HARAKAT.len())]);
                if rng.chance(0.08) {
                    out.push(HARAKAT[rng.below(HARAKAT.len())]);
                }
            }
        }
    }
    out
}

fn stretch_tatweel(word: &str, rng: &mut Rng) -> String {
    let chars: Vec<char> = word.chars().collect();
    if chars.len() < 3 {
        return word.to_string();
    }
    let pos = 1 + rng.below(chars.len() - 2);
    let mut out = String::with_capacity(word.len() + 2);
    for (i, &c) in chars.iter().enumerate() {
        out.push(c);
        if i == pos {
            out.push('\u{0640}');
        }
    }
    out
}

fn gen_number(rng: &mut Rng) -> String {
    let digits = 1 + rng.below(4);
    let arabic_indic = rng.chance(0.65);
    let mut out = String::new();
    for i in 0..digits {
        let d = if i == 0 { 1 + rng.below(9) } else { rng.below(10) };
        if arabic_indic {
            out.push(char::from_u32(0x0660 + d as u32).unwrap());
        } else {
            out.push(char::from_u32('0' as u32 + d as u32).unwrap());
        }
    }
    if digits >= 3 && rng.chance(0.15) {
        let sep_at = out.chars().count() - 2;
        let mut with_sep = String::new();
        for (i, c) in out.chars().enumerate() {
            if i == sep_at {
                with_sep.push(if arabic_indic { '\u{066B}' } else { '.' });
            }
            with_sep.push(c);
        }
        return with_sep;
    }
    out
}

/// Zipf-ranked stem index.
fn zipf_pick(rng: &mut Rng, cumulative: &[f64]) -> usize {
    let roll = rng.f64() * cumulative.last().copied().unwrap_or(1.0);
    match cumulative.binary_search_by(|w| w.partial_cmp(&roll).unwrap()) {
        Ok(i) | Err(i) => i.min(cumulative.len() - 1),
    }
}

fn gen_word(rng: &mut Rng, stem_cdf: &[f64], diacritic_word_p: f64, density: f64) -> String {
    if rng.chance(0.01) {
        return rng.pick(LATIN_WORDS).to_string();
    }
    if rng.chance(0.04) {
        return gen_number(rng);
    }

    let mut word = String::new();
    if rng.chance(0.34) {
        // function words take no affixes
        word.push_str(rng.pick(FUNCTION_WORDS));
    } else {
        let proclitic = if rng.chance(0.28) {
            let roll = rng.f64();
            if roll < 0.42 {
                "و"
            } else if roll < 0.62 {
                "ب"
            } else if roll < 0.76 {
                "ل"
            } else if roll < 0.86 {
                "ف"
            } else if roll < 0.92 {
                "ك"
            } else if roll < 0.97 {
                "وب"
            } else {
                "فب"
            }
        } else {
            ""
        };
        let article = rng.chance(0.40);
        word.push_str(proclitic);
        if article {
            if proclitic.ends_with('ل') {
                word.push('ل'); // لل assimilation
            } else if rng.chance(0.02) {
                word.push_str("ٱل");
            } else {
                word.push_str("ال");
            }
        }
        word.push_str(STEMS[zipf_pick(rng, stem_cdf)]);
        if rng.chance(0.55) {
            let suffix = rng.pick(SUFFIXES);
            word.push_str(suffix);
            let pluralish = matches!(suffix, "ات" | "ان" | "ون" | "ين" | "ة");
            if pluralish && rng.chance(0.35) {
                word.push_str(rng.pick(CHAIN_SUFFIXES));
            }
        }
    }

    let mut word = vary_alif(&word, rng);
    if rng.chance(diacritic_word_p) {
        word = diacritize(&word, rng, density);
    }
    if rng.chance(0.01) {
        word = stretch_tatweel(&word, rng);
    }
    word
}

fn gen_sentence(rng: &mut Rng, stem_cdf: &[f64], diacritic_word_p: f64, density: f64) -> String {
    let len = 4 + rng.below(11);
    let mut sentence = String::new();
    for i in 0..len {
        if i > 0 {
            sentence.push(' ');
        }
        let _ = write!(
            sentence,
            "{}",
            gen_word(rng, stem_cdf, diacritic_word_p, density)
        );
        if i + 1 < len && rng.chance(0.06) {
            let mark = if rng.chance(0.8) { '،' } else { '؛' };
            // cleaned corpora carry a mix of attached and space-separated
            // punctuation
            if rng.chance(0.5) {
                sentence.push(mark);
            } else {
                sentence.push(' ');
                sentence.push(mark);
            }
        }
    }
    let roll = rng.f64();
    let mark = if roll < 0.62 {
        '.'
    } else if roll < 0.80 {
        '؟'
    } else if roll < 0.90 {
        '!'
    } else {
        '،'
    };
    if rng.chance(0.25) {
        sentence.push(mark);
    } else {
        sentence.push(' ');
        sentence.push(mark);
    }
    sentence
}

fn write_corpus(
    path: &PathBuf,
    seed: u64,
    lines: usize,
    stem_cdf: &[f64],
    diacritic_word_p: f64,
    density: f64,
) {
    let mut rng = Rng(seed);
    let mut out = String::new();
    for _ in 0..lines {
        out.push_str(&gen_sentence(&mut rng, stem_cdf, diacritic_word_p, density));
        out.push('\n');
    }
    std::fs::write(path, &out).expect("write corpus file");
    println!("wrote {} ({} bytes)", path.display(), out.len());
}

fn main() {
    let assets = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../assets");
    std::fs::create_dir_all(&assets).expect("create assets dir");

    let stem_cdf: Vec<f64> = {
        let mut acc = 0.0;
        (0..STEMS.len())
            .map(|i| {
                acc += 1.0 / (i as f64 + 3.0).powf(0.92);
                acc
            })
            .collect()
    };

    write_corpus(
        &assets.join("train.ar.txt"),
        0x5EED_0001,
        32_000,
        &stem_cdf,
        0.28,
        0.35,
    );
    write_corpus(
        &assets.join("eval.ar.txt"),
        0x5EED_0002,
        3_200,
        &stem_cdf,
        0.28,
        0.35,
    );
    write_corpus(
        &assets.join("eval_diacritized.ar.txt"),
        0x5EED_0003,
        3_200,
        &stem_cdf,
        0.92,
        0.55,
    );
}
