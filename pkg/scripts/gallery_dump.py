"""Render every gallery entry with its default parameters."""
from riesz.gallery import GALLERY, run_gallery

if __name__ == "__main__":
    for entry in GALLERY:
        print(run_gallery(entry).render())
        print()
