"""`python -m fairspread run --config ...` shortcut for `manage.py fairspread ...`."""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'fairspread.settings')
    from django.core.management import execute_from_command_line

    execute_from_command_line([sys.argv[0], 'fairspread', *sys.argv[1:]])


if __name__ == '__main__':
    main()
