from enum import Enum


class Classification(str, Enum):
    DOMINANT_PLUS = "dominant_plus"
    DOMINANT_MINUS = "dominant_minus"
    SYMMETRIC = "symmetric"
    MIXED = "mixed"

    def __str__(self):
        return self.value

M_MEMBER_CLASSES = (Classification.DOMINANT_PLUS, Classification.SYMMETRIC)
