"""Entry point for ``python -m dcsvd``; same CLI as the ``dcsvd`` script."""

from .harness import main

if __name__ == "__main__":
    main()
