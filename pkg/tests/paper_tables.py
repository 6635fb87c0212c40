"""Published per-word ratios and labels, and the per-subject summary."""

THRESHOLD = 1.03989

# (word, subject, raw ratio, label)
TABLE3 = [
    ("Namma", "Pathological Subject 1", 1.62684, "mild"),
    ("Namma", "Pathological Subject 2", 2.60459, "moderate"),
    ("Namma", "Pathological Subject 3", 4.22875, "severe"),
    ("Ide", "Pathological Subject 1", 0.94963, "no"),
    ("Ide", "Pathological Subject 2", 0.45808, "moderate"),
    ("Ide", "Pathological Subject 3", 1.35224, "mild"),
    ("Shale", "Pathological Subject 1", 1.54192, "mild"),
    ("Shale", "Pathological Subject 2", 1.70836, "mild"),
    ("Shale", "Pathological Subject 3", 2.19511, "moderate"),
    ("Jepi", "Pathological Subject 1", 2.30208, "moderate"),
    ("Jepi", "Pathological Subject 2", 3.52232, "large"),
    ("Jepi", "Pathological Subject 3", 3.19259, "severe"),
    ("Hesa", "Pathological Subject 1", 1.39495, "mild"),
    ("Hesa", "Pathological Subject 2", 1.66019, "mild"),
    ("Hesa", "Pathological Subject 3", 3.23197, "severe"),
    ("Naga", "Pathological Subject 1", 1.04994, "no"),
    ("Naga", "Pathological Subject 2", 2.05953, "moderate"),
    ("Naga", "Pathological Subject 3", 1.09738, "no"),
    ("Saha", "Pathological Subject 1", 1.67477, "mild"),
    ("Saha", "Pathological Subject 2", 1.43331, "mild"),
    ("Saha", "Pathological Subject 3", 2.22832, "moderate"),
    ("Doora", "Pathological Subject 1", 0.76715, "mild"),
    ("Doora", "Pathological Subject 2", 1.47577, "mild"),
    ("Doora", "Pathological Subject 3", 1.42325, "mild"),
    ("Jaya", "Pathological Subject 1", 1.20300, "no"),
    ("Jaya", "Pathological Subject 2", 3.35342, "large"),
    ("Jaya", "Pathological Subject 3", 2.77495, "severe"),
    ("Nanna", "Pathological Subject 1", 1.51143, "mild"),
    ("Nanna", "Pathological Subject 2", 2.34976, "moderate"),
    ("Nanna", "Pathological Subject 3", 2.96658, "severe"),
]

# subject -> (no, mild, moderate, large), overall
TABLE4 = {
    "Pathological Subject 1": ((3, 6, 1, 0), "mild"),
    "Pathological Subject 2": ((0, 4, 4, 2), "moderate"),
    "Pathological Subject 3": ((1, 2, 2, 5), "severe"),
}

WORDS = ["Namma", "Nanna", "Ide", "Shale", "Jepi", "Hesa", "Naga", "Saha", "Doora", "Jaya"]
