"""
Shared plumbing for the synchronization management commands.
"""
from django.core.management.base import BaseCommand, CommandError

from synchronization.exceptions import NcsError
from synchronization.services.graph_io import dump_json, write_text


class NcsCommand(BaseCommand):
    """
    Base command: subclasses implement ``run`` and return the text to emit.
    Domain and file errors exit with status 1.
    """

    def add_output_argument(self, parser):
        parser.add_argument(
            '--output',
            help='Write the result to this file instead of stdout'
        )

    def run(self, *args, **options) -> str:
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            text = self.run(*args, **options)
        except (NcsError, OSError) as e:
            raise CommandError(str(e), returncode=1)
        output = options.get('output')
        if output:
            write_text(output, text)
            self.status(f'Wrote {output}', options)
        elif text:
            self.stdout.write(text, ending='')

    def status(self, message: str, options) -> None:
        """Progress note on stderr, shown from verbosity 2."""
        if options.get('verbosity', 1) > 1:
            self.stderr.write(self.style.SUCCESS(message))

    @staticmethod
    def as_json(payload) -> str:
        return dump_json(payload)
