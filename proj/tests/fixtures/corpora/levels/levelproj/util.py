def normalize(raw):
    lowered = str(raw).strip().lower()
    return " ".join(lowered.split())
