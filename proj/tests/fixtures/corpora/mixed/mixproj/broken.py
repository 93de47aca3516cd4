def broken(:
    """unterminated
